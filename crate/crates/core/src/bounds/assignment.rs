//! Auxiliary-variable assignments with a declared factorization.

use serde::{Deserialize, Serialize};

use super::BoundsError;
use crate::prob::{JointPmf, Role};

/// Conditional-independence tolerance for factorization checks.
pub const FACTOR_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Factorization {
    /// Any joint law over the inputs (and whatever auxiliaries are present).
    Generic,
    /// `p(u, x1, x2)`
    Wu,
    /// `p(u1) p(u2) p(v|u1,u2) p(x2|u2,v) p(x1|u1,u2,v)`
    Bc,
    /// `p(u2c, x2, u1c, u1pb, u2pb, x1)`
    Rtd,
}

impl Factorization {
    pub fn required_roles(self) -> &'static [Role] {
        match self {
            Factorization::Generic => &[Role::X1, Role::X2],
            Factorization::Wu => &[Role::U, Role::X1, Role::X2],
            Factorization::Bc => &[Role::U1, Role::U2, Role::V, Role::X1, Role::X2],
            Factorization::Rtd => &[
                Role::U2c,
                Role::X2,
                Role::U1c,
                Role::U1pb,
                Role::U2pb,
                Role::X1,
            ],
        }
    }

    /// Checks roles and, for `Bc`, the three conditional independences.
    pub fn verify(self, pmf: &JointPmf) -> Result<(), BoundsError> {
        for &r in self.required_roles() {
            if !pmf.has_role(r) {
                return Err(BoundsError::FactorizationMismatch(format!(
                    "{self:?} assignment needs role {r}"
                )));
            }
        }
        if let Some(r) = pmf.roles().into_iter().find(|r| r.is_output()) {
            return Err(BoundsError::FactorizationMismatch(format!(
                "assignment must not contain channel output {r}"
            )));
        }
        if self == Factorization::Bc {
            use Role::*;
            let checks: [(&[Role], &[Role], &[Role], &str); 3] = [
                (&[U1], &[U2], &[], "U1 and U2 are dependent"),
                (&[X2], &[U1], &[U2, V], "X2 depends on U1 given (U2, V)"),
                (
                    &[X1],
                    &[X2],
                    &[U1, U2, V],
                    "X1 depends on X2 given (U1, U2, V)",
                ),
            ];
            for (a, b, c, msg) in checks {
                if !pmf.is_conditionally_independent(a, b, c, FACTOR_TOL)? {
                    return Err(BoundsError::FactorizationMismatch(msg.into()));
                }
            }
        }
        Ok(())
    }
}

/// A joint PMF over auxiliaries and inputs, checked against its factorization.
#[derive(Clone, Debug, PartialEq)]
pub struct AuxAssignment {
    pmf: JointPmf,
    factorization: Factorization,
}

impl AuxAssignment {
    pub fn new(pmf: JointPmf, factorization: Factorization) -> Result<Self, BoundsError> {
        factorization.verify(&pmf)?;
        Ok(AuxAssignment { pmf, factorization })
    }

    pub fn pmf(&self) -> &JointPmf {
        &self.pmf
    }

    pub fn factorization(&self) -> Factorization {
        self.factorization
    }

    /// `p(x1, x2)`
    pub fn input(&self) -> JointPmf {
        self.pmf
            .marginalize(&[Role::X1, Role::X2])
            .expect("inputs are present")
    }

    /// Re-verifies against another factorization (used when one assignment
    /// feeds several evaluators).
    pub fn require(&self, f: Factorization) -> Result<(), BoundsError> {
        if f == self.factorization {
            return Ok(());
        }
        f.verify(&self.pmf)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uniform_pair() -> JointPmf {
        JointPmf::uniform(&[(Role::X1, 2), (Role::X2, 2)]).unwrap()
    }

    #[test]
    fn wu_needs_u() {
        let err = AuxAssignment::new(uniform_pair(), Factorization::Wu).unwrap_err();
        assert!(matches!(err, BoundsError::FactorizationMismatch(_)));
        let with_u = uniform_pair()
            .extend_deterministic(Role::U, 1, |_| 0)
            .unwrap();
        assert!(AuxAssignment::new(with_u, Factorization::Wu).is_ok());
    }

    #[test]
    fn bc_rejects_correlated_u1_u2() {
        // U1 = X1, U2 = X2, V = (X1, X2) with correlated inputs
        let p = JointPmf::from_table(vec![0.5, 0.0, 0.0, 0.5], &[(Role::X1, 2), (Role::X2, 2)])
            .unwrap()
            .extend_deterministic(Role::U1, 2, |i| i[0])
            .unwrap()
            .extend_deterministic(Role::U2, 2, |i| i[1])
            .unwrap()
            .extend_deterministic(Role::V, 4, |i| 2 * i[0] + i[1])
            .unwrap();
        let err = AuxAssignment::new(p, Factorization::Bc).unwrap_err();
        assert!(matches!(err, BoundsError::FactorizationMismatch(_)));
    }

    #[test]
    fn bc_accepts_independent_inputs() {
        let p = uniform_pair()
            .extend_deterministic(Role::U1, 2, |i| i[0])
            .unwrap()
            .extend_deterministic(Role::U2, 2, |i| i[1])
            .unwrap()
            .extend_deterministic(Role::V, 4, |i| 2 * i[0] + i[1])
            .unwrap();
        assert!(AuxAssignment::new(p, Factorization::Bc).is_ok());
    }

    #[test]
    fn outputs_are_rejected() {
        let p = uniform_pair()
            .extend_deterministic(Role::Y1, 1, |_| 0)
            .unwrap();
        assert!(AuxAssignment::new(p, Factorization::Generic).is_err());
    }
}
