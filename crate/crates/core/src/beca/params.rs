use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::BecaError;

/// Names of the seven modulation parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, schemars::JsonSchema)]
#[serde(rename_all = "lowercase")]
pub enum ParamName {
    Alpha,
    Beta,
    Gamma,
    Phi,
    Kappa,
    Lambda,
    Mu,
}

impl ParamName {
    pub const ALL: [ParamName; 7] = [
        ParamName::Alpha,
        ParamName::Beta,
        ParamName::Gamma,
        ParamName::Phi,
        ParamName::Kappa,
        ParamName::Lambda,
        ParamName::Mu,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ParamName::Alpha => "alpha",
            ParamName::Beta => "beta",
            ParamName::Gamma => "gamma",
            ParamName::Phi => "phi",
            ParamName::Kappa => "kappa",
            ParamName::Lambda => "lambda",
            ParamName::Mu => "mu",
        }
    }
}

impl fmt::Display for ParamName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ParamName {
    type Err = BecaError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ParamName::ALL
            .into_iter()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| BecaError::UnknownName(s.to_string()))
    }
}

/// Modulation parameters of the architecture. Every value lies in `[0, 1]`.
///
/// - `alpha`: additive weight of internal state when combining internal and
///   external signals (0 makes the combination purely multiplicative).
/// - `beta`: fraction of a coupling forgotten on each reinforced update.
/// - `gamma`: reactive weight of perceived stimuli in attention.
/// - `phi`: flow from the motivational node into the cognitive node.
/// - `kappa`: decay of perceptual persistence.
/// - `lambda`: conditioning speed.
/// - `mu`: extinction speed of unreinforced couplings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, schemars::JsonSchema)]
#[serde(try_from = "RawParameters", into = "RawParameters")]
pub struct BecaParameters {
    alpha: f64,
    beta: f64,
    gamma: f64,
    phi: f64,
    kappa: f64,
    lambda: f64,
    mu: f64,
}

#[derive(Serialize, Deserialize, schemars::JsonSchema)]
struct RawParameters {
    alpha: f64,
    beta: f64,
    gamma: f64,
    phi: f64,
    kappa: f64,
    lambda: f64,
    mu: f64,
}

impl Default for BecaParameters {
    fn default() -> Self {
        Self {
            alpha: 0.8,
            beta: 0.1,
            gamma: 0.0,
            phi: 1.0,
            kappa: 0.25,
            lambda: 0.1,
            mu: 0.0,
        }
    }
}

fn check(name: ParamName, value: f64) -> Result<f64, BecaError> {
    if (0.0..=1.0).contains(&value) {
        Ok(value)
    } else {
        Err(BecaError::ParameterOutOfRange { name, value })
    }
}

impl BecaParameters {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        alpha: f64,
        beta: f64,
        gamma: f64,
        phi: f64,
        kappa: f64,
        lambda: f64,
        mu: f64,
    ) -> Result<Self, BecaError> {
        Ok(Self {
            alpha: check(ParamName::Alpha, alpha)?,
            beta: check(ParamName::Beta, beta)?,
            gamma: check(ParamName::Gamma, gamma)?,
            phi: check(ParamName::Phi, phi)?,
            kappa: check(ParamName::Kappa, kappa)?,
            lambda: check(ParamName::Lambda, lambda)?,
            mu: check(ParamName::Mu, mu)?,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
    pub fn beta(&self) -> f64 {
        self.beta
    }
    pub fn gamma(&self) -> f64 {
        self.gamma
    }
    pub fn phi(&self) -> f64 {
        self.phi
    }
    pub fn kappa(&self) -> f64 {
        self.kappa
    }
    pub fn lambda(&self) -> f64 {
        self.lambda
    }
    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn get(&self, name: ParamName) -> f64 {
        match name {
            ParamName::Alpha => self.alpha,
            ParamName::Beta => self.beta,
            ParamName::Gamma => self.gamma,
            ParamName::Phi => self.phi,
            ParamName::Kappa => self.kappa,
            ParamName::Lambda => self.lambda,
            ParamName::Mu => self.mu,
        }
    }

    /// Sets one parameter; out-of-range values leave `self` untouched.
    pub fn set(&mut self, name: ParamName, value: f64) -> Result<(), BecaError> {
        let value = check(name, value)?;
        let slot = match name {
            ParamName::Alpha => &mut self.alpha,
            ParamName::Beta => &mut self.beta,
            ParamName::Gamma => &mut self.gamma,
            ParamName::Phi => &mut self.phi,
            ParamName::Kappa => &mut self.kappa,
            ParamName::Lambda => &mut self.lambda,
            ParamName::Mu => &mut self.mu,
        };
        *slot = value;
        Ok(())
    }

    pub fn with(mut self, name: ParamName, value: f64) -> Result<Self, BecaError> {
        self.set(name, value)?;
        Ok(self)
    }
}

impl TryFrom<RawParameters> for BecaParameters {
    type Error = BecaError;

    fn try_from(r: RawParameters) -> Result<Self, Self::Error> {
        BecaParameters::new(r.alpha, r.beta, r.gamma, r.phi, r.kappa, r.lambda, r.mu)
    }
}

impl From<BecaParameters> for RawParameters {
    fn from(p: BecaParameters) -> Self {
        RawParameters {
            alpha: p.alpha,
            beta: p.beta,
            gamma: p.gamma,
            phi: p.phi,
            kappa: p.kappa,
            lambda: p.lambda,
            mu: p.mu,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_out_of_range() {
        assert!(BecaParameters::new(0.8, 0.1, 0.0, 1.0, 0.25, 1.5, 0.0).is_err());
        assert!(BecaParameters::new(-0.1, 0.1, 0.0, 1.0, 0.25, 1.0, 0.0).is_err());
        assert!(BecaParameters::new(f64::NAN, 0.1, 0.0, 1.0, 0.25, 1.0, 0.0).is_err());
        let mut p = BecaParameters::default();
        assert!(p.set(ParamName::Phi, 1.5).is_err());
        assert_eq!(p.phi(), 1.0);
    }

    #[test]
    fn deserialization_validates() {
        let bad =
            r#"{"alpha":0.8,"beta":0.1,"gamma":0.0,"phi":2.0,"kappa":0.25,"lambda":0.1,"mu":0.0}"#;
        assert!(serde_json::from_str::<BecaParameters>(bad).is_err());
        let good = serde_json::to_string(&BecaParameters::default()).unwrap();
        let back: BecaParameters = serde_json::from_str(&good).unwrap();
        assert_eq!(back, BecaParameters::default());
    }
}
