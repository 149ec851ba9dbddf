//! Small numerical helpers shared by the fits and quadratures.

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Ordinary least squares `y ≈ intercept + slope·x`. Needs at least two
/// distinct abscissae; otherwise all fields are NaN.
pub fn linear_fit(x: &[f64], y: &[f64]) -> LinearFit {
    let n = x.len().min(y.len()) as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for (a, b) in x.iter().zip(y) {
        sxx += (a - mx) * (a - mx);
        sxy += (a - mx) * (b - my);
        syy += (b - my) * (b - my);
    }
    if n < 2.0 || sxx == 0.0 {
        return LinearFit {
            slope: f64::NAN,
            intercept: f64::NAN,
            r_squared: f64::NAN,
        };
    }
    let slope = sxy / sxx;
    let r_squared = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    LinearFit {
        slope,
        intercept: my - slope * mx,
        r_squared,
    }
}

/// `count` points from `a` to `b` (inclusive) equally spaced in log.
pub fn geomspace(a: f64, b: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![a];
    }
    let (la, lb) = (a.ln(), b.ln());
    (0..count)
        .map(|i| {
            if i + 1 == count {
                b
            } else {
                (la + (lb - la) * i as f64 / (count - 1) as f64).exp()
            }
        })
        .collect()
}

/// Integral of the log-log linear interpolant of `(t, φ)` samples between
/// consecutive nodes; exact for power laws. Falls back to the trapezoid on
/// intervals with a nonpositive endpoint value.
pub fn power_law_segments(t: &[f64], phi: &[f64]) -> f64 {
    t.windows(2)
        .zip(phi.windows(2))
        .map(|(tw, pw)| power_law_segment(tw[0], tw[1], pw[0], pw[1]))
        .sum()
}

pub fn power_law_segment(ta: f64, tb: f64, fa: f64, fb: f64) -> f64 {
    if fa <= 0.0 || fb <= 0.0 || ta <= 0.0 {
        return 0.5 * (fa + fb) * (tb - ta);
    }
    let ratio = tb / ta;
    let alpha = (fb / fa).ln() / ratio.ln();
    let e = alpha + 1.0;
    if e.abs() < 1e-10 {
        fa * ta * ratio.ln()
    } else {
        fa * ta / e * (ratio.powf(e) - 1.0)
    }
}

/// Trapezoid rule over possibly nonuniform nodes, returning the running
/// integral at every node (starting at 0).
pub fn cumulative_trapezoid(t: &[f64], y: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(t.len());
    let mut acc = 0.0;
    for i in 0..t.len() {
        if i > 0 {
            acc += 0.5 * (y[i] + y[i - 1]) * (t[i] - t[i - 1]);
        }
        out.push(acc);
    }
    out
}
