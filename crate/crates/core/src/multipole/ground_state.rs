//! Power products `∏|x-a_i|^{e_i}` and the closed-form derivatives of the
//! weighted ground states `φ_s = ∏|x-a_i|^{s α_i}`.

use super::config::{Geometry, PoleConfig};
use super::tables::{bilaplacian_coefficients, inverse_squares, ExponentTables};
use crate::error::{Error, Result};
use crate::{rational_to_f64, Rational};

/// The function `x ↦ ∏|x-a_i|^{e_i}` for a fixed configuration.
#[derive(Debug, Clone)]
pub struct PowerProduct<'a> {
    config: &'a PoleConfig,
    exponents: Vec<f64>,
}

impl<'a> PowerProduct<'a> {
    pub fn new(config: &'a PoleConfig, exponents: Vec<f64>) -> Result<Self> {
        if exponents.len() != config.len() {
            return Err(Error::Precondition(format!(
                "{} exponents for {} poles",
                exponents.len(),
                config.len()
            )));
        }
        Ok(Self { config, exponents })
    }

    /// `φ_s`, i.e. exponents `s·α_i`.
    pub fn ground_state(config: &'a PoleConfig, s: Rational) -> Self {
        let s = rational_to_f64(&s);
        let exponents = config.weights_f64().iter().map(|a| s * a).collect();
        Self { config, exponents }
    }

    pub fn config(&self) -> &'a PoleConfig {
        self.config
    }

    pub fn exponents(&self) -> &[f64] {
        &self.exponents
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        let g = self.config.geometry(x)?;
        Ok(self.eval_geometry(&g))
    }

    /// Evaluates in log space: `exp(Σ e_i · ½ log|x-a_i|²)`.
    pub fn eval_geometry(&self, g: &Geometry) -> f64 {
        self.log_eval_geometry(g).exp()
    }

    pub fn log_eval_geometry(&self, g: &Geometry) -> f64 {
        self.exponents
            .iter()
            .zip(g.dist_sq_all())
            .map(|(e, d2)| 0.5 * e * d2.ln())
            .sum()
    }
}

/// `∏|x-a_i|^{e_i}` at a single point.
pub fn eval_power_product(pp: &PowerProduct<'_>, x: &[f64]) -> Result<f64> {
    pp.eval(x)
}

/// Value, gradient, Laplacian and bilaplacian of `φ_s` from the closed forms.
#[derive(Debug, Clone)]
pub struct GroundState<'a> {
    config: &'a PoleConfig,
    s: Rational,
    s_f: f64,
    product: PowerProduct<'a>,
    lap_coef: [f64; 2],
    bilap: Option<(ExponentTables, [f64; 3])>,
}

/// Point values of `φ_s` and its derivatives.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundStateJet {
    pub value: f64,
    pub gradient: Vec<f64>,
    pub laplacian: f64,
}

impl<'a> GroundState<'a> {
    /// Builds the evaluator. The bilaplacian is available only for `s ∉ {2, 4}`.
    pub fn new(config: &'a PoleConfig, s: Rational) -> Self {
        let s_f = rational_to_f64(&s);
        let n_dim = config.dimension() as f64;
        let bilap = ExponentTables::new(config, s).ok().map(|t| {
            let c = bilaplacian_coefficients(config.dimension(), s).map(|c| rational_to_f64(&c));
            (t, c)
        });
        Self {
            config,
            s,
            s_f,
            product: PowerProduct::ground_state(config, s),
            lap_coef: [s_f * (n_dim + s_f - 2.0), s_f * s_f],
            bilap,
        }
    }

    pub fn config(&self) -> &'a PoleConfig {
        self.config
    }

    pub fn s(&self) -> Rational {
        self.s
    }

    pub fn value(&self, g: &Geometry) -> f64 {
        self.product.eval_geometry(g)
    }

    /// `Δφ_s/φ_s = s(N+s-2) Σ α_i/|x-a_i|² - s² Σ_{i<j} α_iα_j|a_i-a_j|²/(|x-a_i|²|x-a_j|²)`
    pub fn laplacian_ratio(&self, g: &Geometry) -> f64 {
        let inv = inverse_squares(g);
        let alpha = self.config.weights_f64();
        let n = self.config.len();
        let single: f64 = alpha.iter().zip(&inv).map(|(a, v)| a * v).sum();
        let mut pair = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                pair += alpha[i] * alpha[j] * self.config.separation_sq(i, j) * inv[i] * inv[j];
            }
        }
        self.lap_coef[0] * single - self.lap_coef[1] * pair
    }

    /// `∇φ_s/φ_s = s Σ α_i (x-a_i)/|x-a_i|²`
    pub fn gradient_ratio(&self, g: &Geometry) -> Vec<f64> {
        let alpha = self.config.weights_f64();
        let mut out = vec![0.0; self.config.dimension()];
        for (i, a) in alpha.iter().enumerate() {
            let c = self.s_f * a / g.dist_sq(i);
            for (o, d) in out.iter_mut().zip(g.offset(i)) {
                *o += c * d;
            }
        }
        out
    }

    /// `Δ²φ_s/φ_s` from the three-term ξ/ζ closed form.
    pub fn bilaplacian_ratio(&self, g: &Geometry) -> Result<f64> {
        let (tables, c) = self
            .bilap
            .as_ref()
            .ok_or_else(|| Error::DegenerateS(self.s.to_string()))?;
        Ok(c[0] * tables.xi_single_sum(g)
            + c[1] * tables.zeta_single_sum(self.config, g)
            + c[2] * tables.zeta_double_sum(self.config, g))
    }

    pub fn jet(&self, g: &Geometry) -> GroundStateJet {
        let value = self.value(g);
        let gradient = self.gradient_ratio(g).into_iter().map(|c| c * value).collect();
        GroundStateJet {
            value,
            gradient,
            laplacian: value * self.laplacian_ratio(g),
        }
    }

    pub fn laplacian(&self, x: &[f64]) -> Result<f64> {
        let g = self.config.geometry(x)?;
        Ok(self.value(&g) * self.laplacian_ratio(&g))
    }

    pub fn bilaplacian(&self, x: &[f64]) -> Result<f64> {
        let g = self.config.geometry(x)?;
        Ok(self.value(&g) * self.bilaplacian_ratio(&g)?)
    }
}

/// `Δφ_s(x)` by the closed form.
pub fn laplacian_phi_s(config: &PoleConfig, s: Rational, x: &[f64]) -> Result<f64> {
    GroundState::new(config, s).laplacian(x)
}

/// `Δ²φ_s(x)` by the closed form; `s` must avoid 2 and 4.
pub fn bilaplacian_phi_s(config: &PoleConfig, s: Rational, x: &[f64]) -> Result<f64> {
    ExponentTables::new(config, s)?;
    GroundState::new(config, s).bilaplacian(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multipole::regular_simplex;

    fn int(v: i64) -> Rational {
        Rational::from_integer(v)
    }

    fn axis(dim: usize, k: usize, t: f64) -> Vec<f64> {
        let mut v = vec![0.0; dim];
        v[k] = t;
        v
    }

    fn single_pole() -> PoleConfig {
        PoleConfig::new(5, vec![vec![0.0; 5]], None).unwrap()
    }

    fn two_poles() -> PoleConfig {
        PoleConfig::new(5, vec![vec![0.0; 5], axis(5, 0, 1.0)], None).unwrap()
    }

    #[test]
    fn power_product_single_factor() {
        let cfg = single_pole();
        let pp = PowerProduct::new(&cfg, vec![2.0]).unwrap();
        let v = eval_power_product(&pp, &[3.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
        assert!((v - 9.0).abs() < 1e-12);
    }

    #[test]
    fn power_product_midpoint() {
        let cfg = two_poles();
        let pp = PowerProduct::new(&cfg, vec![-0.5, -0.5]).unwrap();
        let v = pp.eval(&axis(5, 0, 0.5)).unwrap();
        assert!((v - 2.0).abs() < 1e-12);
        assert!(matches!(
            pp.eval(&axis(5, 0, 1.0)),
            Err(Error::EvalAtPole { pole: 1, .. })
        ));
    }

    #[test]
    fn power_product_survives_extreme_distances() {
        // Each factor alone overflows f64; the product is 10^90.
        let cfg = PoleConfig::new(5, vec![vec![0.0; 5], axis(5, 0, 1e8)], None).unwrap();
        let pp = PowerProduct::new(&cfg, vec![-30.0, -30.0]).unwrap();
        assert!(1e-11f64.powf(-30.0).is_infinite());
        let v = pp.eval(&axis(5, 1, 1e-11)).unwrap();
        assert!((v.log10() - 90.0).abs() < 1e-9, "{v}");
    }

    #[test]
    fn fundamental_solution_is_harmonic() {
        let cfg = single_pole();
        let x = [0.3, -1.2, 0.4, 0.0, 2.0];
        assert_eq!(laplacian_phi_s(&cfg, int(-3), &x).unwrap(), 0.0);
    }

    #[test]
    fn radial_laplacian_of_norm() {
        // Δ|x| = (N-1)/|x| = 4 on the unit sphere of R^5.
        let cfg = single_pole();
        let v = laplacian_phi_s(&cfg, int(1), &axis(5, 2, 1.0)).unwrap();
        assert!((v - 4.0).abs() < 1e-14);
    }

    #[test]
    fn single_pole_bilaplacian() {
        let cfg = single_pole();
        let x = [0.6, 0.0, 0.0, 0.8, 0.0];
        let v = bilaplacian_phi_s(&cfg, int(-2), &x).unwrap();
        assert!((v + 8.0).abs() < 1e-12);
        let v = bilaplacian_phi_s(&cfg, int(-1), &[1.3, 0.2, 0.0, -0.7, 0.1]).unwrap();
        assert!(v.abs() < 1e-14);
        assert!(matches!(
            bilaplacian_phi_s(&cfg, int(4), &x),
            Err(Error::DegenerateS(_))
        ));
    }

    #[test]
    fn gradient_ratio_matches_difference_quotient() {
        let cfg = PoleConfig::new(5, regular_simplex(3, 5).unwrap(), None).unwrap();
        let gs = GroundState::new(&cfg, int(-1));
        let x = [0.3, 0.9, -0.2, 0.5, 0.1];
        let g = cfg.geometry(&x).unwrap();
        let jet = gs.jet(&g);
        let h = 1e-6;
        for k in 0..5 {
            let mut xp = x;
            let mut xm = x;
            xp[k] += h;
            xm[k] -= h;
            let fp = gs.value(&cfg.geometry(&xp).unwrap());
            let fm = gs.value(&cfg.geometry(&xm).unwrap());
            let fd = (fp - fm) / (2.0 * h);
            assert!((fd - jet.gradient[k]).abs() < 1e-8, "axis {k}");
        }
    }
}
