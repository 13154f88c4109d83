use serde_json::Value;
use weilsum_web::*;

fn parse(s: String) -> Value {
    serde_json::from_str(&s).unwrap()
}

#[test]
fn spectrum_over_f8() {
    let v = parse(spectrum_json("2^3", 3).unwrap());
    assert_eq!(v["report"]["value_count"], 3);
    let plot = v["plot"].as_array().unwrap();
    let points: Vec<(f64, u64)> = plot
        .iter()
        .map(|p| (p["approx"].as_f64().unwrap(), p["count"].as_u64().unwrap()))
        .collect();
    assert_eq!(points, vec![(-4.0, 1), (0.0, 3), (4.0, 3)]);
}

#[test]
fn plot_approximations_track_exact_values() {
    // irrational values over F_5 at d = 3, checked against the second
    // moment Σ_a W(a)^2 = q^2
    let v = parse(spectrum_json("5", 3).unwrap());
    let total: f64 = v["plot"]
        .as_array()
        .unwrap()
        .iter()
        .map(|p| p["approx"].as_f64().unwrap().powi(2) * p["count"].as_f64().unwrap())
        .sum();
    // W(0) = 0 for d coprime to q - 1, so the units carry the whole moment
    assert!((total - 25.0).abs() < 1e-9, "{total}");
}

#[test]
fn classes_of_f27() {
    let v = parse(classes_json("3^3").unwrap());
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 3);
    assert!(rows[0]["degenerate"].as_bool().unwrap());
    assert!(rows
        .iter()
        .all(|r| r["failures"].as_array().unwrap().is_empty()));
    let three: Vec<u64> = rows
        .iter()
        .filter(|r| r["value_count"] == 3)
        .map(|r| r["d"].as_u64().unwrap())
        .collect();
    assert_eq!(three, vec![5]);
}

#[test]
fn families_over_f64() {
    let v = parse(families_json(2, 6).unwrap());
    let fams = v["families"].as_array().unwrap();
    assert!(!fams.is_empty());
    assert!(fams.iter().all(|f| f["matches"].as_bool().unwrap()));
    let rejected = v["rejected"].as_array().unwrap();
    assert!(rejected
        .iter()
        .any(|r| r.as_str().unwrap().starts_with("row 6 d=7")));
}

#[test]
fn errors_are_reported() {
    assert!(matches!(
        spectrum_json("2^13", 1),
        Err(WebError::TooLarge(8192))
    ));
    assert!(spectrum_json("2^4", 5).is_err());
    assert!(spectrum_json("nonsense", 1).is_err());
    assert!(families_json(7, 9).is_err());
}
