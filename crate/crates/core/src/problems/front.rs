use crate::error::{Error, Result};
use crate::linalg;
use crate::moo::ObjectiveVector;
use crate::problem::Problem;

/// Number of front samples used by [`FrontOracle`].
pub const FRONT_SAMPLES: usize = 10_000;

/// A problem whose Pareto set is a known curve `t ↦ θ(t)`, `t ∈ [0, 1]`,
/// running from the main-task minimizer (`t = 0`) to the auxiliary one.
pub trait ParetoCurve: Problem {
    /// `None` when this instance has no closed-form Pareto set.
    fn pareto_set_at(&self, t: f64) -> Option<Vec<f64>>;
}

fn front_point(curve: &dyn ParetoCurve, t: f64) -> Result<ObjectiveVector> {
    let theta = curve
        .pareto_set_at(t)
        .ok_or_else(|| Error::NotAvailable(format!("{} has no analytic front", curve.name())))?;
    curve.evaluate(&theta)
}

/// `count` objective vectors at uniformly spaced curve parameters.
pub fn analytic_front(curve: &dyn ParetoCurve, count: usize) -> Result<Vec<ObjectiveVector>> {
    if count == 0 {
        return Err(Error::InvalidArgument("count must be positive".into()));
    }
    if count == 1 {
        return Ok(vec![front_point(curve, 0.5)?]);
    }
    (0..count)
        .map(|j| front_point(curve, j as f64 / (count - 1) as f64))
        .collect()
}

/// Objective-space distance to the analytic front.
///
/// The nearest of [`FRONT_SAMPLES`] samples is refined by golden-section search
/// on the curve parameter between its two neighbours, so the reported distance
/// is not limited by the sample spacing.
pub struct FrontOracle<'a> {
    curve: &'a dyn ParetoCurve,
    ts: Vec<f64>,
    samples: Vec<ObjectiveVector>,
}

impl<'a> FrontOracle<'a> {
    pub fn new(curve: &'a dyn ParetoCurve) -> Result<Self> {
        Self::with_samples(curve, FRONT_SAMPLES)
    }

    pub fn with_samples(curve: &'a dyn ParetoCurve, count: usize) -> Result<Self> {
        let count = count.max(2);
        let ts: Vec<f64> = (0..count).map(|j| j as f64 / (count - 1) as f64).collect();
        let samples = analytic_front(curve, count)?;
        Ok(Self { curve, ts, samples })
    }

    pub fn samples(&self) -> &[ObjectiveVector] {
        &self.samples
    }

    pub fn distance(&self, losses: &[f64]) -> Result<f64> {
        let (k, best) = self
            .samples
            .iter()
            .map(|s| linalg::distance(s, losses))
            .enumerate()
            .fold((0, f64::INFINITY), |acc, (i, d)| if d < acc.1 { (i, d) } else { acc });
        let lo = self.ts[k.saturating_sub(1)];
        let hi = self.ts[(k + 1).min(self.ts.len() - 1)];
        let refined = self.golden(lo, hi, losses)?;
        Ok(best.min(refined))
    }

    fn golden(&self, mut a: f64, mut b: f64, losses: &[f64]) -> Result<f64> {
        const INV_PHI: f64 = 0.618_033_988_749_894_9;
        let f = |t: f64| -> Result<f64> { Ok(linalg::distance(&front_point(self.curve, t)?, losses)) };
        let mut c = b - INV_PHI * (b - a);
        let mut d = a + INV_PHI * (b - a);
        let (mut fc, mut fd) = (f(c)?, f(d)?);
        for _ in 0..80 {
            if fc < fd {
                b = d;
                d = c;
                fd = fc;
                c = b - INV_PHI * (b - a);
                fc = f(c)?;
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + INV_PHI * (b - a);
                fd = f(d)?;
            }
        }
        Ok(fc.min(fd))
    }
}
