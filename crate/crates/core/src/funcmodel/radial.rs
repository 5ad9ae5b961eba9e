//! Radially symmetric log-profiles L(r) = log f(c + r u).

/// Log-profile of a radial family as a function of the distance to its center.
#[derive(Debug, Clone, PartialEq)]
pub enum RadialLaw {
    /// Indicator of the ball of the given radius.
    Flat { radius: f64 },
    /// (1 - r^2)_+^(p/2), the function ĥ^p.
    Hhat { p: f64 },
    /// exp(-r^2 / (2 sigma^2)).
    Gauss { sigma: f64 },
    /// exp(-a r).
    ExpNeg { a: f64 },
    /// (1 + L_inner / s)_+^s.
    Approx { inner: Box<RadialLaw>, s: f64 },
}

impl RadialLaw {
    /// log f at distance r, `-inf` outside the support.
    pub fn log_value(&self, r: f64) -> f64 {
        match self {
            RadialLaw::Flat { radius } => {
                if r <= *radius {
                    0.0
                } else {
                    f64::NEG_INFINITY
                }
            }
            RadialLaw::Hhat { p } => {
                if r < 1.0 {
                    0.5 * p * (-r * r).ln_1p()
                } else {
                    f64::NEG_INFINITY
                }
            }
            RadialLaw::Gauss { sigma } => -r * r / (2.0 * sigma * sigma),
            RadialLaw::ExpNeg { a } => -a * r,
            RadialLaw::Approx { inner, s } => {
                let l = inner.log_value(r);
                if l > -*s {
                    s * (l / s).ln_1p()
                } else {
                    f64::NEG_INFINITY
                }
            }
        }
    }

    /// d/dr log f at distance r (inside the support).
    pub fn log_deriv(&self, r: f64) -> f64 {
        match self {
            RadialLaw::Flat { .. } => 0.0,
            RadialLaw::Hhat { p } => -p * r / (1.0 - r * r),
            RadialLaw::Gauss { sigma } => -r / (sigma * sigma),
            RadialLaw::ExpNeg { a } => -a,
            RadialLaw::Approx { inner, s } => {
                let l = inner.log_value(r);
                inner.log_deriv(r) / (1.0 + l / s)
            }
        }
    }

    /// Radius of the support, if bounded.
    pub fn hard_radius(&self) -> Option<f64> {
        match self {
            RadialLaw::Flat { radius } => Some(*radius),
            RadialLaw::Hhat { .. } => Some(1.0),
            RadialLaw::Gauss { .. } | RadialLaw::ExpNeg { .. } => None,
            RadialLaw::Approx { inner, s } => Some(inner.level_radius(-*s)),
        }
    }

    /// Radius where L drops to `level` (< 0); the hard radius if it never does.
    fn level_radius(&self, level: f64) -> f64 {
        match self {
            RadialLaw::Flat { radius } => *radius,
            RadialLaw::Hhat { p } => (1.0 - (2.0 * level / p).exp()).sqrt(),
            RadialLaw::Gauss { sigma } => sigma * (-2.0 * level).sqrt(),
            RadialLaw::ExpNeg { a } => -level / a,
            RadialLaw::Approx { inner, s } => {
                // s ln(1 + L/s) = level  <=>  L = s (e^{level/s} - 1)
                inner.level_radius(s * (level / s).exp_m1()).min(inner.level_radius(-*s))
            }
        }
    }

    /// Support radius, or the truncation radius where f drops below `tail_eps`.
    /// The flag is true for a genuine support boundary.
    pub fn effective_radius(&self, tail_eps: f64) -> (f64, bool) {
        match self.hard_radius() {
            Some(r) => (r, true),
            None => (self.level_radius(tail_eps.ln()), false),
        }
    }

    pub fn is_flat(&self) -> bool {
        matches!(self, RadialLaw::Flat { .. })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn approx_radius_of_gaussian() {
        let law = RadialLaw::Approx {
            inner: Box::new(RadialLaw::Gauss { sigma: 1.0 }),
            s: 2.0,
        };
        // (1 - r^2/4)_+^2 vanishes at r = 2
        assert!((law.hard_radius().unwrap() - 2.0).abs() < 1e-14);
        let v = law.log_value(1.0).exp();
        assert!((v - 0.5625).abs() < 1e-14);
    }

    #[test]
    fn derivative_matches_difference() {
        let laws = [
            RadialLaw::Hhat { p: 0.5 },
            RadialLaw::Gauss { sigma: 0.7 },
            RadialLaw::ExpNeg { a: 2.0 },
            RadialLaw::Approx { inner: Box::new(RadialLaw::Hhat { p: 3.0 }), s: 1.5 },
        ];
        for law in &laws {
            let r = 0.3;
            let h = 1e-6;
            let fd = (law.log_value(r + h) - law.log_value(r - h)) / (2.0 * h);
            assert!((fd - law.log_deriv(r)).abs() < 1e-6, "{law:?}");
        }
    }

    #[test]
    fn truncation_radius() {
        let (r, hard) = RadialLaw::Gauss { sigma: 1.0 }.effective_radius(1e-12);
        assert!(!hard);
        assert!((-r * r / 2.0 - 1e-12f64.ln()).abs() < 1e-9);
    }
}
