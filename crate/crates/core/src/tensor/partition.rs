use super::{SymTensor, TensorError};

/// Coefficients of the two-phase problem with a partition jump `v₁ = K_p v₂`
/// at the interface. The capacity factor of both phases is 1.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoPhaseCoefficients {
    pub d1: SymTensor,
    pub d2: SymTensor,
    pub r1: f64,
    pub r2: f64,
    pub f1: f64,
    pub f2: f64,
    pub partition_coefficient: f64,
}

/// Per-region coefficients of the continuous single-field problem
/// `σ ∂u/∂t − ∇·(d∇u) + r u = f`.
#[derive(Clone, Debug, PartialEq)]
pub struct SingleFieldCoefficients {
    pub d: SymTensor,
    pub sigma: f64,
    pub r: f64,
    pub f: f64,
}

impl TwoPhaseCoefficients {
    fn validate(&self) -> Result<(), TensorError> {
        let kp = self.partition_coefficient;
        if !(kp > 0.0 && kp.is_finite()) {
            return Err(TensorError::PartitionCoefficient(kp));
        }
        if self.d1.dim() != self.d2.dim() {
            return Err(TensorError::DimensionMismatch {
                left: self.d1.dim(),
                right: self.d2.dim(),
            });
        }
        if !(self.r1 >= 0.0 && self.r2 >= 0.0) {
            return Err(TensorError::InvalidCoefficient("reaction rates must be non-negative"));
        }
        Ok(())
    }

    /// Inverse of [`transform_partition`].
    pub fn from_transformed(
        region1: &SingleFieldCoefficients,
        region2: &SingleFieldCoefficients,
    ) -> Result<Self, TensorError> {
        if region1.sigma != 1.0 {
            return Err(TensorError::InvalidCoefficient("region 1 must have unit capacity"));
        }
        if !(region2.sigma > 0.0 && region2.sigma.is_finite()) {
            return Err(TensorError::InvalidCoefficient("capacity must be positive"));
        }
        let kp = 1.0 / region2.sigma;
        Ok(Self {
            d1: region1.d,
            d2: region2.d.scaled(kp)?,
            r1: region1.r,
            r2: region2.r * kp,
            f1: region1.f,
            f2: region2.f,
            partition_coefficient: kp,
        })
    }
}

/// Removes the interface jump by the substitution `u = v₁` in region 1 and
/// `u = K_p v₂` in region 2.
///
/// Region 2 gets `d₂/K_p`, `σ = 1/K_p` and `r₂/K_p`; region 1 is unchanged.
pub fn transform_partition(
    c: &TwoPhaseCoefficients,
) -> Result<[SingleFieldCoefficients; 2], TensorError> {
    c.validate()?;
    let kp = c.partition_coefficient;
    let region1 = SingleFieldCoefficients {
        d: c.d1,
        sigma: 1.0,
        r: c.r1,
        f: c.f1,
    };
    let region2 = SingleFieldCoefficients {
        d: c.d2.scaled(1.0 / kp)?,
        sigma: 1.0 / kp,
        r: c.r2 / kp,
        f: c.f2,
    };
    Ok([region1, region2])
}
