use crate::error::{Error, Result};
use crate::linalg::wrap_angle;
use std::f64::consts::PI;

/// Default distance from `π` that a consecutive phase increment must keep
/// for the minimal-jump unwrap to be trusted.
pub const UNWRAP_MARGIN: f64 = 0.1 * PI;

/// Raw phases (complex arguments in `(-π, π]`) against circuit depth.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSeries {
    pub depths: Vec<usize>,
    pub angles: Vec<f64>,
    /// Optional fit weights; unweighted when absent.
    pub weights: Option<Vec<f64>>,
}

impl PhaseSeries {
    pub fn new(depths: Vec<usize>, angles: Vec<f64>) -> Result<Self> {
        if depths.len() != angles.len() {
            return Err(Error::InsufficientData(format!(
                "{} depths but {} angles",
                depths.len(),
                angles.len()
            )));
        }
        if depths.len() < 2 {
            return Err(Error::InsufficientData(
                "a phase fit needs at least two depths".into(),
            ));
        }
        if depths.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InsufficientData(
                "depths must be strictly increasing".into(),
            ));
        }
        if angles.iter().any(|a| !a.is_finite()) {
            return Err(Error::InsufficientData("non-finite phase".into()));
        }
        Ok(PhaseSeries {
            depths,
            angles,
            weights: None,
        })
    }

    pub fn with_weights(mut self, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != self.depths.len()
            || weights.iter().any(|w| !(*w > 0.0) || !w.is_finite())
        {
            return Err(Error::InsufficientData(
                "weights must be positive, one per depth".into(),
            ));
        }
        self.weights = Some(weights);
        Ok(self)
    }

    /// Removes a known phase rate: `angle − rate·depth`, rewrapped.
    pub fn demodulated(&self, rate: f64) -> PhaseSeries {
        PhaseSeries {
            depths: self.depths.clone(),
            angles: self
                .depths
                .iter()
                .zip(&self.angles)
                .map(|(&d, &a)| wrap_angle(a - rate * d as f64))
                .collect(),
            weights: self.weights.clone(),
        }
    }

    /// Rate from the first two depths, defined modulo `2π/(d1 − d0)`.
    pub fn coarse_rate(&self) -> f64 {
        let step = (self.depths[1] - self.depths[0]) as f64;
        wrap_angle(self.angles[1] - self.angles[0]) / step
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearPhaseFit {
    /// Radians per unit depth.
    pub slope: f64,
    pub intercept: f64,
    pub slope_stderr: f64,
    pub intercept_stderr: f64,
    pub residual_rms: f64,
    /// `π − max |increment|` over the unwrap.
    pub unwrap_margin: f64,
    pub unwrapped: Vec<f64>,
}

/// Sequential minimal-jump unwrap. Fails instead of guessing when an
/// increment comes within `margin` of `±π`.
pub fn unwrap_phases(depths: &[usize], angles: &[f64], margin: f64) -> Result<(Vec<f64>, f64)> {
    let limit = PI - margin;
    let mut out = Vec::with_capacity(angles.len());
    let mut worst: f64 = 0.0;
    let Some(&first) = angles.first() else {
        return Ok((out, PI));
    };
    out.push(first);
    for i in 1..angles.len() {
        let step = wrap_angle(angles[i] - angles[i - 1]);
        if step.abs() > limit {
            return Err(Error::UnwrapAmbiguity {
                from: depths[i - 1],
                to: depths[i],
                increment: step,
                limit,
            });
        }
        worst = worst.max(step.abs());
        out.push(out[i - 1] + step);
    }
    Ok((out, PI - worst))
}

/// Unwraps the series and fits `angle = slope·depth + intercept` by
/// (weighted) least squares. State-preparation and readout offsets land in
/// the intercept.
pub fn fit_linear_phase(series: &PhaseSeries) -> Result<LinearPhaseFit> {
    let (unwrapped, unwrap_margin) = unwrap_phases(&series.depths, &series.angles, UNWRAP_MARGIN)?;
    let x: Vec<f64> = series.depths.iter().map(|&d| d as f64).collect();
    let w = series.weights.clone().unwrap_or_else(|| vec![1.0; x.len()]);
    let line = weighted_line(&x, &unwrapped, &w);
    Ok(LinearPhaseFit {
        slope: line.slope,
        intercept: line.intercept,
        slope_stderr: line.slope_stderr,
        intercept_stderr: line.intercept_stderr,
        residual_rms: line.residual_rms,
        unwrap_margin,
        unwrapped,
    })
}

/// [`fit_linear_phase`] after removing the coarse rate of the first two
/// depths. Fast-winding series then unwrap safely; the slope is returned
/// modulo `2π/(d1 − d0)`, which is all the data determine.
pub fn fit_linear_phase_demodulated(series: &PhaseSeries) -> Result<LinearPhaseFit> {
    let rate = series.coarse_rate();
    let mut fit = fit_linear_phase(&series.demodulated(rate))?;
    fit.slope += rate;
    for (u, &d) in fit.unwrapped.iter_mut().zip(&series.depths) {
        *u += rate * d as f64;
    }
    Ok(fit)
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Line {
    pub slope: f64,
    pub intercept: f64,
    pub slope_stderr: f64,
    pub intercept_stderr: f64,
    pub residual_rms: f64,
}

/// Weighted least-squares line with the usual residual-based errors.
pub(crate) fn weighted_line(x: &[f64], y: &[f64], w: &[f64]) -> Line {
    let sw: f64 = w.iter().sum();
    let xm = x.iter().zip(w).map(|(x, w)| x * w).sum::<f64>() / sw;
    let ym = y.iter().zip(w).map(|(y, w)| y * w).sum::<f64>() / sw;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for i in 0..x.len() {
        sxx += w[i] * (x[i] - xm) * (x[i] - xm);
        sxy += w[i] * (x[i] - xm) * (y[i] - ym);
    }
    let slope = sxy / sxx;
    let intercept = ym - slope * xm;
    let mut rss = 0.0;
    let mut sq = 0.0;
    for i in 0..x.len() {
        let r = y[i] - intercept - slope * x[i];
        rss += w[i] * r * r;
        sq += r * r;
    }
    let n = x.len() as f64;
    let sigma2 = if x.len() > 2 { rss / (n - 2.0) } else { 0.0 };
    Line {
        slope,
        intercept,
        slope_stderr: (sigma2 / sxx).sqrt(),
        intercept_stderr: (sigma2 * (1.0 / sw + xm * xm / sxx)).sqrt(),
        residual_rms: (sq / n).sqrt(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_series_is_flat() {
        let s = PhaseSeries::new(vec![1, 2, 3, 4], vec![0.7; 4]).unwrap();
        let fit = fit_linear_phase(&s).unwrap();
        assert_eq!(fit.slope, 0.0);
        assert!((fit.intercept - 0.7).abs() < 1e-15);
    }

    #[test]
    fn jumps_near_pi_raise() {
        let s = PhaseSeries::new(vec![1, 2], vec![0.0, 3.0]).unwrap();
        assert!(matches!(
            fit_linear_phase(&s),
            Err(Error::UnwrapAmbiguity { from: 1, to: 2, .. })
        ));
    }

    #[test]
    fn demodulation_handles_near_pi_steps() {
        let depths: Vec<usize> = (1..=8).collect();
        let angles = depths
            .iter()
            .map(|&d| wrap_angle(3.0 * d as f64 + 0.2))
            .collect();
        let s = PhaseSeries::new(depths, angles).unwrap();
        let fit = fit_linear_phase_demodulated(&s).unwrap();
        assert!((wrap_angle(fit.slope - 3.0)).abs() < 1e-12);
    }

    #[test]
    fn rejects_unsorted_depths() {
        assert!(PhaseSeries::new(vec![2, 1], vec![0.0, 0.0]).is_err());
    }
}
