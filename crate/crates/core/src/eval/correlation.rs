use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use super::EvalError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationReport {
    pub r: f64,
    /// Two-sided.
    pub p_value: f64,
    pub n: usize,
    pub points: Vec<(f64, f64, String)>,
}

impl CorrelationReport {
    pub fn r_squared(&self) -> f64 {
        self.r * self.r
    }
}

pub fn pearson(points: &[(f64, f64)]) -> Result<CorrelationReport, EvalError> {
    let labeled: Vec<(f64, f64, String)> =
        points.iter().map(|&(x, y)| (x, y, String::new())).collect();
    pearson_labeled(labeled)
}

/// Product-moment correlation with a two-sided p-value from Student's t with
/// `n - 2` degrees of freedom.
pub fn pearson_labeled(points: Vec<(f64, f64, String)>) -> Result<CorrelationReport, EvalError> {
    let n = points.len();
    if n < 3 {
        return Err(EvalError::TooFewPoints(n));
    }
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n as f64;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n as f64;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y, _) in &points {
        let dx = x - mx;
        let dy = y - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx.is_nan() || syy.is_nan() || sxx <= 0.0 || syy <= 0.0 {
        return Err(EvalError::DegenerateVariance);
    }
    let r = (sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0);
    let df = (n - 2) as f64;
    let p_value = if r.abs() >= 1.0 {
        0.0
    } else {
        let t = r * (df / (1.0 - r * r)).sqrt();
        let dist = StudentsT::new(0.0, 1.0, df).expect("df is positive");
        (2.0 * dist.sf(t.abs())).clamp(0.0, 1.0)
    };
    Ok(CorrelationReport {
        r,
        p_value,
        n,
        points,
    })
}
