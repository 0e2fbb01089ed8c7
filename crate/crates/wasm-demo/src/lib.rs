//! Browser bindings: equilibrium density, tied-exponent `B(t)` sweep and
//! weighted Fekete points. Every export takes a weight config as JSON text
//! and returns JSON text.

use serde_json::json;
use wasm_bindgen::prelude::*;

use capstan::equilibrium::{capacity, solve_equilibrium};
use capstan::fekete::fekete_points;
use capstan::gsbound::{sweep_points, tied_bound};
use capstan::weightspec::{to_root_form, RootWeight, WeightConfig, DEFAULT_ROOT_TOL};

const MAX_SAMPLES: usize = 20_000;
const MAX_SWEEP: usize = 400;
const MAX_FEKETE: usize = 60;

fn root_weight(config: &str) -> Result<(String, RootWeight), String> {
    let fw = WeightConfig::from_json(config)
        .and_then(|c| c.to_factored())
        .map_err(|e| e.to_string())?;
    let rw = to_root_form(&fw, DEFAULT_ROOT_TOL).map_err(|e| e.to_string())?;
    Ok((fw.to_string(), rw))
}

/// Density samples plus capacity data for the weight in `config`.
pub fn density_json(config: &str, samples: usize) -> Result<String, String> {
    if samples == 0 || samples > MAX_SAMPLES {
        return Err(format!("samples must lie in 1..={MAX_SAMPLES}"));
    }
    let (label, w) = root_weight(config)?;
    let m = solve_equilibrium(&w).map_err(|e| e.to_string())?;
    let rep = capacity(&m).map_err(|e| e.to_string())?;
    let (xs, ys): (Vec<f64>, Vec<f64>) = m.sample_density(samples).into_iter().unzip();
    Ok(json!({
        "weight": label,
        "interval": [w.interval.0, w.interval.1],
        "endpoints": m.support.endpoints,
        "c_w": rep.capacity,
        "F_w": rep.robin_constant,
        "x": xs,
        "density": ys,
    })
    .to_string())
}

/// `B(t)` with every exponent of `config` replaced by `t`, on `steps` points.
/// Failed solves come back as `null`.
pub fn sweep_json(config: &str, t0: f64, t1: f64, steps: usize) -> Result<String, String> {
    if steps == 0 || steps > MAX_SWEEP {
        return Err(format!("steps must lie in 1..={MAX_SWEEP}"));
    }
    if !(t0 > 0.0 && t1 > t0) {
        return Err("need 0 < t0 < t1".into());
    }
    let polys: Vec<Vec<i64>> = WeightConfig::from_json(config)
        .map_err(|e| e.to_string())?
        .factors
        .into_iter()
        .map(|f| f.coeffs)
        .collect();
    if polys.is_empty() {
        return Err("the weight has no factors to tie".into());
    }
    let ts = sweep_points(t0, t1, steps);
    let bs: Vec<Option<f64>> = ts.iter().map(|&t| tied_bound(&polys, t).ok().map(|r| r.b)).collect();
    Ok(json!({ "t": ts, "B": bs }).to_string())
}

/// Weighted Fekete points for `n` points.
pub fn fekete_json(config: &str, n: usize) -> Result<String, String> {
    if !(2..=MAX_FEKETE).contains(&n) {
        return Err(format!("n must lie in 2..={MAX_FEKETE}"));
    }
    let (label, w) = root_weight(config)?;
    let f = fekete_points(&w, n).map_err(|e| e.to_string())?;
    Ok(json!({ "weight": label, "n": n, "points": f.points, "d_n": f.d_n }).to_string())
}

#[wasm_bindgen]
pub fn density(config: &str, samples: usize) -> Result<String, JsError> {
    density_json(config, samples).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn bound_sweep(config: &str, t0: f64, t1: f64, steps: usize) -> Result<String, JsError> {
    sweep_json(config, t0, t1, steps).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn fekete(config: &str, n: usize) -> Result<String, JsError> {
    fekete_json(config, n).map_err(|e| JsError::new(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    const JACOBI: &str =
        r#"{"interval":[0,1],"factors":[{"coeffs":[0,1],"exponent":0.195},{"coeffs":[1,-1],"exponent":0.195}]}"#;

    fn parse(s: &str) -> serde_json::Value {
        serde_json::from_str(s).unwrap()
    }

    #[test]
    fn density_payload() {
        let v = parse(&density_json(JACOBI, 100).unwrap());
        assert_eq!(v["x"].as_array().unwrap().len(), 100);
        assert!((v["c_w"].as_f64().unwrap() - 0.1045575588).abs() < 1e-8);
        assert!(density_json(JACOBI, 0).is_err());
        assert!(density_json("{", 10).is_err());
    }

    #[test]
    fn sweep_payload() {
        let v = parse(&sweep_json(JACOBI, 0.1, 0.3, 5).unwrap());
        let bs: Vec<f64> = v["B"].as_array().unwrap().iter().map(|b| b.as_f64().unwrap()).collect();
        assert_eq!(bs.len(), 5);
        assert!(bs.iter().all(|&b| b > 0.9 && b < 1.0));
        assert!(sweep_json(r#"{"interval":[0,1],"factors":[]}"#, 0.1, 0.3, 5).is_err());
    }

    #[test]
    fn fekete_payload() {
        let v = parse(&fekete_json(JACOBI, 8).unwrap());
        let pts = v["points"].as_array().unwrap();
        assert_eq!(pts.len(), 8);
        assert!(v["d_n"].as_f64().unwrap() > 0.1045575588);
        assert!(fekete_json(JACOBI, 1).is_err());
    }
}
