use std::fmt::Debug;

use num_complex::Complex64;

use crate::scalar::ExactScalar;

/// Scalar operations needed by the dense matrix kernels.
///
/// Implemented for [`ExactScalar`] (exact simulation state) and
/// [`Complex64`] (numeric blocks produced by non-exact gates).
pub trait Field: Clone + PartialEq + Debug + Send + Sync + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn conj(&self) -> Self;
    /// Numeric image; non-finite when the value is out of double range.
    fn to_c64(&self) -> Complex64;

    fn add_assign(&mut self, other: &Self) {
        *self = Field::add(self, other);
    }
}

impl Field for ExactScalar {
    fn zero() -> Self {
        ExactScalar::zero()
    }
    fn one() -> Self {
        ExactScalar::one()
    }
    fn is_zero(&self) -> bool {
        ExactScalar::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        ExactScalar::add(self, other)
    }
    fn sub(&self, other: &Self) -> Self {
        ExactScalar::sub(self, other)
    }
    fn mul(&self, other: &Self) -> Self {
        ExactScalar::mul(self, other)
    }
    fn neg(&self) -> Self {
        ExactScalar::neg(self)
    }
    fn conj(&self) -> Self {
        ExactScalar::conj(self)
    }
    fn to_c64(&self) -> Complex64 {
        self.to_complex()
            .unwrap_or(Complex64::new(f64::INFINITY, f64::INFINITY))
    }
    fn add_assign(&mut self, other: &Self) {
        if !other.is_zero() {
            *self = ExactScalar::add(self, other);
        }
    }
}

impl Field for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn conj(&self) -> Self {
        Complex64::conj(self)
    }
    fn to_c64(&self) -> Complex64 {
        *self
    }
    fn add_assign(&mut self, other: &Self) {
        *self += other;
    }
}
