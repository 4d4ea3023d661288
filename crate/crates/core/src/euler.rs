//! Ideal-gas equation of state and state vectors for the 1D Euler equations.

use crate::error::{Error, Result};

/// Gas constants shared by both domains.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GasParams {
    /// Heat-capacity ratio.
    pub gamma: f64,
    /// Specific gas constant in J/(kg K).
    pub r_sgc: f64,
}

impl GasParams {
    pub fn new(gamma: f64, r_sgc: f64) -> Result<Self> {
        if !(gamma > 1.0) || !gamma.is_finite() {
            return Err(Error::Validation(format!("gamma must be > 1, got {gamma}")));
        }
        if !(r_sgc > 0.0) || !r_sgc.is_finite() {
            return Err(Error::Validation(format!("r_sgc must be > 0, got {r_sgc}")));
        }
        Ok(Self { gamma, r_sgc })
    }

    /// Air-like gas used by all shipped cases.
    pub fn air() -> Self {
        Self {
            gamma: 1.4,
            r_sgc: 277.13333,
        }
    }

    /// (gamma - 1) / (gamma + 1)
    pub fn mu2(&self) -> f64 {
        (self.gamma - 1.0) / (self.gamma + 1.0)
    }
}

/// Primitive state (density, velocity, pressure).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PrimState {
    pub rho: f64,
    pub u: f64,
    pub p: f64,
}

/// Conserved state (density, momentum density, total energy density).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ConsState {
    pub rho: f64,
    pub mom: f64,
    pub en: f64,
}

impl PrimState {
    pub const fn new(rho: f64, u: f64, p: f64) -> Self {
        Self { rho, u, p }
    }

    pub fn is_physical(&self) -> bool {
        self.rho > 0.0 && self.p > 0.0 && self.u.is_finite()
    }

    pub fn check(&self) -> Result<()> {
        if self.is_physical() {
            Ok(())
        } else {
            Err(Error::NonPhysicalState(format!("{self:?}")))
        }
    }

    pub fn sound_speed(&self, g: &GasParams) -> f64 {
        sound_speed(self, g)
    }

    pub fn temperature(&self, g: &GasParams) -> f64 {
        self.p / (self.rho * g.r_sgc)
    }

    pub fn to_cons(&self, g: &GasParams) -> ConsState {
        prim_to_cons(self, g)
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.rho, self.u, self.p]
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }
}

impl ConsState {
    pub const fn new(rho: f64, mom: f64, en: f64) -> Self {
        Self { rho, mom, en }
    }

    pub fn to_prim(&self, g: &GasParams) -> Result<PrimState> {
        cons_to_prim(self, g)
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.rho, self.mom, self.en]
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }
}

pub fn prim_to_cons(s: &PrimState, g: &GasParams) -> ConsState {
    ConsState {
        rho: s.rho,
        mom: s.rho * s.u,
        en: s.p / (g.gamma - 1.0) + 0.5 * s.rho * s.u * s.u,
    }
}

pub fn cons_to_prim(c: &ConsState, g: &GasParams) -> Result<PrimState> {
    if !(c.rho > 0.0) {
        return Err(Error::NonPhysicalState(format!(
            "non-positive density {:e}",
            c.rho
        )));
    }
    let u = c.mom / c.rho;
    let p = (g.gamma - 1.0) * (c.en - 0.5 * c.mom * u);
    if !(p > 0.0) || !u.is_finite() {
        return Err(Error::NonPhysicalState(format!(
            "non-positive pressure {p:e} from {c:?}"
        )));
    }
    Ok(PrimState { rho: c.rho, u, p })
}

pub fn sound_speed(s: &PrimState, g: &GasParams) -> f64 {
    (g.gamma * s.p / s.rho).sqrt()
}

/// Physical flux (rho u, rho u^2 + p, u (E + p)).
pub fn flux(s: &PrimState, g: &GasParams) -> ConsState {
    let en = s.p / (g.gamma - 1.0) + 0.5 * s.rho * s.u * s.u;
    ConsState {
        rho: s.rho * s.u,
        mom: s.rho * s.u * s.u + s.p,
        en: s.u * (en + s.p),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn prim_to_cons_examples() {
        let g = GasParams::air();
        let c = prim_to_cons(&PrimState::new(1.0, 250.0, 146820.4), &g);
        assert_eq!(c.rho, 1.0);
        assert_eq!(c.mom, 250.0);
        assert!(rel(c.en, 398301.0) < 1e-12);
        let c = prim_to_cons(&PrimState::new(1.0, 0.0, 1.0), &g);
        assert!(rel(c.en, 2.5) < 1e-14);
        let c = prim_to_cons(&PrimState::new(2.0, -3.0, 5.0), &g);
        assert_eq!(c.mom, -6.0);
        assert!(rel(c.en, 21.5) < 1e-14);
    }

    #[test]
    fn cons_to_prim_examples() {
        let g = GasParams::air();
        let p = cons_to_prim(&ConsState::new(1.0, 250.0, 398301.0), &g).unwrap();
        assert!(rel(p.p, 146820.4) < 1e-12);
        assert_eq!(p.u, 250.0);
        let p = cons_to_prim(&ConsState::new(1.0, 0.0, 2.5), &g).unwrap();
        assert!(rel(p.p, 1.0) < 1e-14);
        assert!(matches!(
            cons_to_prim(&ConsState::new(1.0, 0.0, -1.0), &g),
            Err(Error::NonPhysicalState(_))
        ));
        assert!(matches!(
            cons_to_prim(&ConsState::new(0.0, 0.0, 1.0), &g),
            Err(Error::NonPhysicalState(_))
        ));
    }

    #[test]
    fn sound_speed_examples() {
        let g = GasParams::air();
        assert!((sound_speed(&PrimState::new(1.0, 0.0, 146820.4), &g) - 453.375).abs() < 0.01);
        assert!((sound_speed(&PrimState::new(1.4, 0.0, 1.0), &g) - 1.0).abs() < 1e-15);
        assert!((sound_speed(&PrimState::new(1.0, 0.0, 1.0), &g) - 1.18322).abs() < 1e-5);
    }

    #[test]
    fn flux_examples() {
        let g = GasParams::air();
        let f = flux(&PrimState::new(1.0, 0.0, 1.0), &g);
        assert_eq!((f.rho, f.mom, f.en), (0.0, 1.0, 0.0));
        let f = flux(&PrimState::new(1.0, 250.0, 146820.4), &g);
        assert_eq!(f.rho, 250.0);
        assert!(rel(f.mom, 209320.4) < 1e-12);
        assert!(rel(f.en, 136280350.0) < 1e-12);
        let f = flux(&PrimState::new(2.0, 1.0, 1.0), &g);
        assert!(rel(f.mom, 3.0) < 1e-15 && rel(f.en, 4.5) < 1e-15);
    }

    #[test]
    fn gas_validation() {
        assert!(GasParams::new(0.9, 1.0).is_err());
        assert!(GasParams::new(1.4, 0.0).is_err());
        assert!(GasParams::new(1.4, 287.0).is_ok());
    }

    proptest! {
        #[test]
        fn round_trip(rho in 1e-3f64..1e3, u in -1e3f64..1e3, p in 1e-2f64..1e7) {
            let g = GasParams::air();
            let s = PrimState::new(rho, u, p);
            let back = cons_to_prim(&prim_to_cons(&s, &g), &g).unwrap();
            // pressure recovery loses digits when kinetic energy dominates
            let ke = 0.5 * rho * u * u;
            let p_tol = 1e-13 * (1.0 + ke / p) * 4.0;
            prop_assert!(rel(back.rho, rho) < 1e-13);
            prop_assert!((back.u - u).abs() <= 1e-13 * u.abs().max(1e-300));
            prop_assert!(rel(back.p, p) < p_tol);
        }

        #[test]
        fn characteristic_ordering(rho in 1e-3f64..1e3, u in -1e3f64..1e3, p in 1e-2f64..1e7) {
            let g = GasParams::air();
            let s = PrimState::new(rho, u, p);
            let c = sound_speed(&s, &g);
            prop_assert!(u - c < u && u < u + c);
            prop_assert_eq!(flux(&s, &g).rho, rho * u);
        }
    }
}
