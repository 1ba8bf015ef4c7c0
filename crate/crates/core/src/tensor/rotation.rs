use std::f64::consts::{PI, TAU};

use rand::Rng;

use super::{Matrix, TensorError};

/// Planar rotation by an angle `phi ∈ [0, 2π)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rotation2 {
    phi: f64,
}

impl Rotation2 {
    pub fn new(phi: f64) -> Result<Self, TensorError> {
        if (0.0..TAU).contains(&phi) {
            Ok(Self { phi })
        } else {
            Err(TensorError::AngleRange { name: "phi", value: phi })
        }
    }

    /// Inverse CDF of the flat density on `[0, 2π)`; `u` must lie in `[0, 1)`.
    pub fn from_uniform(u: f64) -> Self {
        debug_assert!((0.0..1.0).contains(&u));
        Self { phi: TAU * u }
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    /// `[[cos φ, sin φ], [−sin φ, cos φ]]`
    pub fn matrix(&self) -> Matrix {
        let (s, c) = self.phi.sin_cos();
        let mut m = [[0.0; 3]; 3];
        m[0][0] = c;
        m[0][1] = s;
        m[1][0] = -s;
        m[1][1] = c;
        Matrix::from_block(2, m)
    }
}

/// Spatial rotation in z-x-z Euler angles.
///
/// The matrix is `R₃(γ)·R₁(β)·R₃(α)`: rotate about axis 3 by `alpha`, then
/// about the new axis 1 by `beta`, then about the new axis 3 by `gamma`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rotation3 {
    alpha: f64,
    beta: f64,
    gamma: f64,
}

impl Rotation3 {
    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Result<Self, TensorError> {
        if !(0.0..TAU).contains(&alpha) {
            return Err(TensorError::AngleRange { name: "alpha", value: alpha });
        }
        if !(0.0..=PI).contains(&beta) {
            return Err(TensorError::AngleRange { name: "beta", value: beta });
        }
        if !(0.0..TAU).contains(&gamma) {
            return Err(TensorError::AngleRange { name: "gamma", value: gamma });
        }
        Ok(Self { alpha, beta, gamma })
    }

    /// Maps three uniform deviates in `[0, 1)` to Haar-distributed angles.
    ///
    /// `beta = arccos(1 − 2u)` inverts the CDF of the density `sin β / 2`.
    pub fn from_uniforms(u_alpha: f64, u_beta: f64, u_gamma: f64) -> Self {
        Self {
            alpha: TAU * u_alpha,
            beta: (1.0 - 2.0 * u_beta).clamp(-1.0, 1.0).acos(),
            gamma: TAU * u_gamma,
        }
    }

    pub fn angles(&self) -> (f64, f64, f64) {
        (self.alpha, self.beta, self.gamma)
    }

    pub fn matrix(&self) -> Matrix {
        r3(self.gamma).mul(&r1(self.beta)).mul(&r3(self.alpha))
    }
}

fn r3(psi: f64) -> Matrix {
    let (s, c) = psi.sin_cos();
    Matrix::from_block(3, [[c, s, 0.0], [-s, c, 0.0], [0.0, 0.0, 1.0]])
}

fn r1(beta: f64) -> Matrix {
    let (s, c) = beta.sin_cos();
    Matrix::from_block(3, [[1.0, 0.0, 0.0], [0.0, c, s], [0.0, -s, c]])
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Rotation {
    Planar(Rotation2),
    Spatial(Rotation3),
}

impl Rotation {
    pub fn matrix(&self) -> Matrix {
        match self {
            Rotation::Planar(r) => r.matrix(),
            Rotation::Spatial(r) => r.matrix(),
        }
    }

    /// Draws a Haar-uniform rotation of the given dimension.
    pub fn sample<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Self {
        match dim {
            2 => Rotation::Planar(sample_rotation_2d(rng)),
            3 => Rotation::Spatial(sample_rotation_3d(rng)),
            _ => panic!("rotations exist only in 2 or 3 dimensions, got {dim}"),
        }
    }
}

impl From<Rotation2> for Rotation {
    fn from(r: Rotation2) -> Self {
        Rotation::Planar(r)
    }
}

impl From<Rotation3> for Rotation {
    fn from(r: Rotation3) -> Self {
        Rotation::Spatial(r)
    }
}

pub fn rotation_matrix(rot: impl Into<Rotation>) -> Matrix {
    rot.into().matrix()
}

pub fn sample_rotation_2d<R: Rng + ?Sized>(rng: &mut R) -> Rotation2 {
    Rotation2::from_uniform(rng.random::<f64>())
}

/// Draws α, β, γ in that order from the stream.
pub fn sample_rotation_3d<R: Rng + ?Sized>(rng: &mut R) -> Rotation3 {
    let ua = rng.random::<f64>();
    let ub = rng.random::<f64>();
    let ug = rng.random::<f64>();
    Rotation3::from_uniforms(ua, ub, ug)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn assert_matrix(m: &Matrix, expected: &[&[f64]], tol: f64) {
        for (i, row) in expected.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                assert!((m.get(i, j) - v).abs() <= tol, "entry ({i},{j}) = {} != {v}", m.get(i, j));
            }
        }
    }

    #[test]
    fn zero_angles_give_identity() {
        let t = Rotation3::new(0.0, 0.0, 0.0).unwrap().matrix();
        assert_matrix(&t, &[&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0]], 0.0);
    }

    #[test]
    fn quarter_turn_in_plane() {
        let t = Rotation2::new(FRAC_PI_2).unwrap().matrix();
        assert_matrix(&t, &[&[0.0, 1.0], &[-1.0, 0.0]], 1e-15);
    }

    #[test]
    fn euler_composition_order() {
        // R₁(π/2)·R₃(π/2) multiplied out by hand:
        // R₃(π/2) = [[0,1,0],[-1,0,0],[0,0,1]], R₁(π/2) = [[1,0,0],[0,0,1],[0,-1,0]]
        let t = Rotation3::new(FRAC_PI_2, FRAC_PI_2, 0.0).unwrap().matrix();
        assert_matrix(&t, &[&[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0], &[1.0, 0.0, 0.0]], 1e-15);
    }

    #[test]
    fn inverse_cdf_endpoints() {
        assert_eq!(Rotation2::from_uniform(0.0).phi(), 0.0);
        assert!((Rotation2::from_uniform(0.5).phi() - PI).abs() < 1e-15);
        assert_eq!(Rotation3::from_uniforms(0.0, 0.0, 0.0).angles().1, 0.0);
        assert!((Rotation3::from_uniforms(0.0, 0.5, 0.0).angles().1 - FRAC_PI_2).abs() < 1e-15);
    }

    #[test]
    fn angle_ranges_are_checked() {
        assert!(Rotation2::new(TAU).is_err());
        assert!(Rotation2::new(-0.1).is_err());
        assert!(Rotation3::new(0.0, 3.5, 0.0).is_err());
        assert!(Rotation3::new(0.0, PI, 0.0).is_ok());
    }
}
