use super::{SymTensor, TensorError};

/// Periodic stack of two flat phases.
///
/// Phase 1 is the aqueous phase; phase 2 is the lipid phase whose raw
/// diffusivities are divided by the partition coefficient before averaging.
/// Thicknesses may be absolute lengths or volume fractions; only their ratio
/// matters.
#[derive(Clone, Debug, PartialEq)]
pub struct LayeredMedium {
    pub phase1_thickness: f64,
    pub phase2_thickness: f64,
    pub phase1: SymTensor,
    pub phase2: SymTensor,
    pub partition_coefficient: f64,
    /// Axis normal to the interfaces.
    pub normal_axis: usize,
}

impl LayeredMedium {
    /// Medium described by volume fractions `p1` and `1 − p1`.
    pub fn from_fraction(
        p1: f64,
        phase1: SymTensor,
        phase2: SymTensor,
        partition_coefficient: f64,
        normal_axis: usize,
    ) -> Self {
        Self {
            phase1_thickness: p1,
            phase2_thickness: 1.0 - p1,
            phase1,
            phase2,
            partition_coefficient,
            normal_axis,
        }
    }

    fn validate(&self) -> Result<(), TensorError> {
        if !(self.phase1_thickness > 0.0 && self.phase2_thickness > 0.0) {
            return Err(TensorError::InvalidMedium("layer thicknesses must be positive"));
        }
        if !(self.partition_coefficient > 0.0 && self.partition_coefficient.is_finite()) {
            return Err(TensorError::PartitionCoefficient(self.partition_coefficient));
        }
        if self.phase1.dim() != self.phase2.dim() {
            return Err(TensorError::DimensionMismatch {
                left: self.phase1.dim(),
                right: self.phase2.dim(),
            });
        }
        if self.normal_axis >= self.phase1.dim() {
            return Err(TensorError::InvalidMedium("normal axis out of range"));
        }
        if !(self.phase1.is_diagonal() && self.phase2.is_diagonal()) {
            return Err(TensorError::NonDiagonalPhase);
        }
        Ok(())
    }
}

/// Effective tensor of a perfectly layered medium.
///
/// Tangential entries are thickness-weighted arithmetic means, the normal entry
/// is the thickness-weighted harmonic mean, off-diagonals are zero.
pub fn layered_effective_tensor(medium: &LayeredMedium) -> Result<SymTensor, TensorError> {
    medium.validate()?;
    let a1 = medium.phase1_thickness;
    let a2 = medium.phase2_thickness;
    let kp = medium.partition_coefficient;
    let diag: Vec<f64> = (0..medium.phase1.dim())
        .map(|axis| {
            let d1 = medium.phase1.get(axis, axis);
            let d2 = medium.phase2.get(axis, axis) / kp;
            if axis == medium.normal_axis {
                harmonic_mean_profile(&[(a1, d1), (a2, d2)])
            } else {
                Ok((a1 * d1 + a2 * d2) / (a1 + a2))
            }
        })
        .collect::<Result<_, _>>()?;
    SymTensor::diagonal(&diag)
}

/// Length-weighted harmonic mean of a piecewise-constant 1D profile.
pub fn harmonic_mean_profile(segments: &[(f64, f64)]) -> Result<f64, TensorError> {
    if segments.is_empty() {
        return Err(TensorError::EmptyProfile);
    }
    let mut length = 0.0;
    let mut resistance = 0.0;
    for (index, &(len, d)) in segments.iter().enumerate() {
        if !(len > 0.0 && d > 0.0 && len.is_finite() && d.is_finite()) {
            return Err(TensorError::InvalidSegment { index });
        }
        length += len;
        resistance += len / d;
    }
    Ok(length / resistance)
}
