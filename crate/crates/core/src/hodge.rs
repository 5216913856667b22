//! The cyclic group of Hodge isometries of the transcendental lattice.

use std::sync::Arc;

use crate::arith::euler_phi;
use crate::error::{Error, Result};
use crate::matrix::IntMatrix;
use crate::qform::{FiniteFormMap, FiniteQuadraticForm, Sign};

/// How a generator `g` of the Hodge group is specified.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HodgeAction {
    /// Images of the generators of `A_T` under `g`.
    Discriminant(Vec<Vec<u64>>),
    /// `g` itself as a matrix on the basis of `T`.
    Lattice(IntMatrix),
}

/// A cyclic Hodge group of even order `2I`, optionally with its generator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HodgeGroupSpec {
    pub order: u64,
    pub action: Option<HodgeAction>,
}

impl Default for HodgeGroupSpec {
    fn default() -> Self {
        Self::generic()
    }
}

/// Converts a matrix on `T` to its induced map on `A_T`.
pub type LatticeToDiscriminant = dyn Fn(&IntMatrix) -> Result<FiniteFormMap>;

impl HodgeGroupSpec {
    /// `{±id}`.
    pub fn generic() -> Self {
        HodgeGroupSpec { order: 2, action: None }
    }

    pub fn new(order: u64, action: Option<HodgeAction>) -> Result<Self> {
        if order == 0 || order % 2 == 1 {
            return Err(Error::invalid(format!(
                "Hodge group order {order} must be even and positive"
            )));
        }
        Ok(HodgeGroupSpec { order, action })
    }

    pub fn is_generic(&self) -> bool {
        self.order == 2
    }

    /// Checks `φ(2I) | rank T`.
    pub fn check_rank(&self, t_rank: usize) -> Result<()> {
        let phi = euler_phi(self.order);
        if !(t_rank as u64).is_multiple_of(phi) {
            return Err(Error::invalid(format!(
                "Hodge group order {} is impossible: phi({}) = {phi} does not divide rank T = {t_rank}",
                self.order, self.order
            )));
        }
        Ok(())
    }

    /// The generator acting on `a_t`, validated to be an isometry whose
    /// `I`-th power is `-id`.
    ///
    /// `lattice_action` converts a `Lattice` action to the discriminant side;
    /// without it only `Discriminant` actions are accepted.
    pub fn generator_on(
        &self,
        a_t: &Arc<FiniteQuadraticForm>,
        lattice_action: Option<&LatticeToDiscriminant>,
    ) -> Result<FiniteFormMap> {
        let g = match (&self.action, self.order) {
            (None, 2) => FiniteFormMap::negation(a_t.clone()),
            (None, _) => return Err(Error::invalid("explicit Hodge action required")),
            (Some(HodgeAction::Discriminant(images)), _) => {
                FiniteFormMap::new(a_t.clone(), a_t.clone(), images.clone(), Sign::Plus)?
            }
            (Some(HodgeAction::Lattice(m)), _) => match lattice_action {
                Some(f) => f(m)?,
                None => {
                    return Err(Error::invalid(
                        "a lattice-level Hodge action needs the transcendental lattice",
                    ))
                }
            },
        };
        if !g.is_bijective() {
            return Err(Error::invalid("Hodge action is not bijective on A_T"));
        }
        let half = g.pow(self.order / 2)?;
        if half != FiniteFormMap::negation(a_t.clone()) {
            return Err(Error::invalid(format!(
                "Hodge action g must satisfy g^{} = -id on A_T",
                self.order / 2
            )));
        }
        Ok(g)
    }
}

/// Even `m` with `φ(m) | t`, in increasing order.
///
/// Since `φ(m) >= sqrt(m / 2)`, every such `m` is at most `2 t^2`.
pub fn hodge_order_candidates(t: u64) -> Vec<u64> {
    if t == 0 {
        return vec![];
    }
    (2..=2 * t * t)
        .step_by(2)
        .filter(|&m| t.is_multiple_of(euler_phi(m)))
        .collect()
}
