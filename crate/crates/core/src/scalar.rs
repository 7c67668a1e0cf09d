//! Exact arithmetic over the field Q(i, √2).
//!
//! Every value is stored as `(a + b·i) + (c + d·i)·√2` with rational
//! components. Because √2 is irrational over Q(i), the four components are
//! uniquely determined by the value, so equality is component-wise and every
//! operation leaves the result in canonical form.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScalarError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("value exceeds the range of a double")]
    Overflow,
    #[error("invalid scalar literal at column {col}: {msg}")]
    Syntax { col: usize, msg: String },
}

/// An element of Q(i, √2).
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct ExactScalar {
    re: BigRational,
    im: BigRational,
    re_r2: BigRational,
    im_r2: BigRational,
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

// Multiplication in Q(i): (a + bi)(c + di).
fn cmul(
    a: &BigRational,
    b: &BigRational,
    c: &BigRational,
    d: &BigRational,
) -> (BigRational, BigRational) {
    let re = if a.is_zero() || c.is_zero() {
        BigRational::zero()
    } else {
        a * c
    };
    let re = if b.is_zero() || d.is_zero() {
        re
    } else {
        re - b * d
    };
    let im = if a.is_zero() || d.is_zero() {
        BigRational::zero()
    } else {
        a * d
    };
    let im = if b.is_zero() || c.is_zero() {
        im
    } else {
        im + b * c
    };
    (re, im)
}

impl ExactScalar {
    pub fn new(re: BigRational, im: BigRational, re_r2: BigRational, im_r2: BigRational) -> Self {
        ExactScalar {
            re,
            im,
            re_r2,
            im_r2,
        }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn i() -> Self {
        ExactScalar {
            im: BigRational::one(),
            ..Self::default()
        }
    }

    pub fn sqrt2() -> Self {
        ExactScalar {
            re_r2: BigRational::one(),
            ..Self::default()
        }
    }

    /// √2/2, the Hadamard entry.
    pub fn inv_sqrt2() -> Self {
        ExactScalar {
            re_r2: rat(1, 2),
            ..Self::default()
        }
    }

    pub fn from_int(n: i64) -> Self {
        ExactScalar {
            re: BigRational::from_integer(n.into()),
            ..Self::default()
        }
    }

    pub fn from_ratio(n: i64, d: i64) -> Self {
        ExactScalar {
            re: rat(n, d),
            ..Self::default()
        }
    }

    pub fn from_rational(q: BigRational) -> Self {
        ExactScalar {
            re: q,
            ..Self::default()
        }
    }

    /// Builds `(a + b·i) + (c + d·i)·√2` from small-integer fractions `(num, den)`.
    pub fn from_parts(a: (i64, i64), b: (i64, i64), c: (i64, i64), d: (i64, i64)) -> Self {
        ExactScalar {
            re: rat(a.0, a.1),
            im: rat(b.0, b.1),
            re_r2: rat(c.0, c.1),
            im_r2: rat(d.0, d.1),
        }
    }

    /// Rational part of the real component.
    pub fn re(&self) -> &BigRational {
        &self.re
    }

    pub fn im(&self) -> &BigRational {
        &self.im
    }

    /// Coefficient of √2 in the real component.
    pub fn re_r2(&self) -> &BigRational {
        &self.re_r2
    }

    pub fn im_r2(&self) -> &BigRational {
        &self.im_r2
    }

    pub fn components(&self) -> [&BigRational; 4] {
        [&self.re, &self.im, &self.re_r2, &self.im_r2]
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero() && self.re_r2.is_zero() && self.im_r2.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero() && self.re_r2.is_zero() && self.im_r2.is_zero()
    }

    /// True when the imaginary components vanish.
    pub fn is_real(&self) -> bool {
        self.im.is_zero() && self.im_r2.is_zero()
    }

    /// True when the value lies in Q (no `i`, no `√2`).
    pub fn is_rational(&self) -> bool {
        self.is_real() && self.re_r2.is_zero()
    }

    pub fn add(&self, other: &Self) -> Self {
        ExactScalar {
            re: &self.re + &other.re,
            im: &self.im + &other.im,
            re_r2: &self.re_r2 + &other.re_r2,
            im_r2: &self.im_r2 + &other.im_r2,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        ExactScalar {
            re: &self.re - &other.re,
            im: &self.im - &other.im,
            re_r2: &self.re_r2 - &other.re_r2,
            im_r2: &self.im_r2 - &other.im_r2,
        }
    }

    pub fn neg(&self) -> Self {
        ExactScalar {
            re: -&self.re,
            im: -&self.im,
            re_r2: -&self.re_r2,
            im_r2: -&self.im_r2,
        }
    }

    /// Field product, reducing with `i² = −1` and `√2² = 2`.
    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        // (A + B√2)(C + D√2) = (AC + 2BD) + (AD + BC)√2 with A..D in Q(i).
        let (ac_re, ac_im) = cmul(&self.re, &self.im, &other.re, &other.im);
        let (bd_re, bd_im) = cmul(&self.re_r2, &self.im_r2, &other.re_r2, &other.im_r2);
        let (ad_re, ad_im) = cmul(&self.re, &self.im, &other.re_r2, &other.im_r2);
        let (bc_re, bc_im) = cmul(&self.re_r2, &self.im_r2, &other.re, &other.im);
        let two = BigRational::from_integer(2.into());
        ExactScalar {
            re: ac_re + &two * bd_re,
            im: ac_im + &two * bd_im,
            re_r2: ad_re + bc_re,
            im_r2: ad_im + bc_im,
        }
    }

    /// Complex conjugate; `√2` is real so only the `i` parts flip sign.
    pub fn conj(&self) -> Self {
        ExactScalar {
            re: self.re.clone(),
            im: -&self.im,
            re_r2: self.re_r2.clone(),
            im_r2: -&self.im_r2,
        }
    }

    /// `|x|²`, an element of Q(√2).
    pub fn norm_sqr(&self) -> Self {
        self.mul(&self.conj())
    }

    /// Image under the automorphism `√2 ↦ −√2`.
    fn sqrt2_conj(&self) -> Self {
        ExactScalar {
            re: self.re.clone(),
            im: self.im.clone(),
            re_r2: -&self.re_r2,
            im_r2: -&self.im_r2,
        }
    }

    pub fn inverse(&self) -> Result<Self, ScalarError> {
        if self.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        // x · σ(x) = A² − 2B² lies in Q(i); then divide by its Gaussian norm.
        let s = self.sqrt2_conj();
        let n = self.mul(&s);
        debug_assert!(n.re_r2.is_zero() && n.im_r2.is_zero());
        let denom = &n.re * &n.re + &n.im * &n.im;
        let n_inv = ExactScalar {
            re: &n.re / &denom,
            im: -&n.im / &denom,
            ..Self::default()
        };
        Ok(s.mul(&n_inv))
    }

    pub fn div(&self, other: &Self) -> Result<Self, ScalarError> {
        Ok(self.mul(&other.inverse()?))
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        ExactScalar {
            re: &self.re * q,
            im: &self.im * q,
            re_r2: &self.re_r2 * q,
            im_r2: &self.im_r2 * q,
        }
    }

    /// Double-precision image of the value.
    pub fn to_complex(&self) -> Result<Complex64, ScalarError> {
        let f = |q: &BigRational| -> Result<f64, ScalarError> {
            if q.is_zero() {
                return Ok(0.0);
            }
            match q.to_f64() {
                Some(v) if v.is_finite() => Ok(v),
                _ => Err(ScalarError::Overflow),
            }
        };
        let r2 = std::f64::consts::SQRT_2;
        let re = f(&self.re)? + f(&self.re_r2)? * r2;
        let im = f(&self.im)? + f(&self.im_r2)? * r2;
        if re.is_finite() && im.is_finite() {
            Ok(Complex64::new(re, im))
        } else {
            Err(ScalarError::Overflow)
        }
    }

    /// Sign of a real value. `None` if the value has an imaginary part.
    pub fn real_signum(&self) -> Option<Ordering> {
        if !self.is_real() {
            return None;
        }
        Some(sign_of(&self.re, &self.re_r2))
    }

    /// Exact ordering of two real values.
    pub fn cmp_real(&self, other: &Self) -> Option<Ordering> {
        self.sub(other).real_signum()
    }

    /// Largest decimal digit count over the numerators and denominators of
    /// the four components.
    pub fn max_digits(&self) -> usize {
        self.components()
            .iter()
            .flat_map(|q| [q.numer(), q.denom()])
            .map(decimal_digits)
            .max()
            .unwrap_or(1)
    }
}

fn decimal_digits(n: &BigInt) -> usize {
    if n.is_zero() {
        1
    } else {
        n.magnitude().to_str_radix(10).len()
    }
}

/// Sign of `a + c·√2` for rationals `a`, `c`.
fn sign_of(a: &BigRational, c: &BigRational) -> Ordering {
    let sa = a.signum();
    let sc = c.signum();
    let cmp_zero = |q: &BigRational| q.cmp(&BigRational::zero());
    if c.is_zero() {
        return cmp_zero(a);
    }
    if a.is_zero() || sa == sc {
        return cmp_zero(c);
    }
    // Opposite signs: compare a² with 2c².
    let a2 = a * a;
    let c2 = c * c * BigRational::from_integer(2.into());
    match a2.cmp(&c2) {
        Ordering::Greater => cmp_zero(a),
        Ordering::Less => cmp_zero(c),
        Ordering::Equal => Ordering::Equal,
    }
}

fn write_rational(
    f: &mut fmt::Formatter<'_>,
    q: &BigRational,
    suffix: &str,
    first: bool,
) -> fmt::Result {
    let neg = q.numer().sign() == Sign::Minus;
    if first {
        if neg {
            write!(f, "-")?;
        }
    } else {
        write!(f, " {} ", if neg { '-' } else { '+' })?;
    }
    let mag = q.abs();
    if mag.is_one() && !suffix.is_empty() {
        return write!(f, "{}", &suffix[1..]);
    }
    if mag.is_integer() {
        write!(f, "{}", mag.numer())?;
    } else {
        write!(f, "{}/{}", mag.numer(), mag.denom())?;
    }
    write!(f, "{suffix}")
}

impl fmt::Display for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (q, suffix) in [
            (&self.re, ""),
            (&self.im, "*i"),
            (&self.re_r2, "*r2"),
            (&self.im_r2, "*i*r2"),
        ] {
            if !q.is_zero() {
                write_rational(f, q, suffix, first)?;
                first = false;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ExactScalar({self})")
    }
}

impl FromStr for ExactScalar {
    type Err = ScalarError;

    /// Parses sums of terms like `p/q`, `p/q*i`, `p/q*r2`, `p/q*i*r2`.
    /// Whitespace is ignored and the coefficient may be omitted (`-i`, `r2`).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let chars: Vec<(usize, char)> = s
            .char_indices()
            .filter(|(_, c)| !c.is_whitespace())
            .map(|(i, c)| (i + 1, c))
            .collect();
        let err = |col: usize, msg: &str| ScalarError::Syntax {
            col,
            msg: msg.to_string(),
        };
        if chars.is_empty() {
            return Err(err(1, "empty literal"));
        }
        let mut acc = ExactScalar::zero();
        let mut pos = 0;
        while pos < chars.len() {
            let mut negative = false;
            let mut saw_sign = false;
            while pos < chars.len() && matches!(chars[pos].1, '+' | '-') {
                if saw_sign && pos > 0 {
                    return Err(err(chars[pos].0, "repeated sign"));
                }
                negative ^= chars[pos].1 == '-';
                saw_sign = true;
                pos += 1;
            }
            if pos > 0 && !saw_sign {
                return Err(err(chars[pos].0, "expected '+' or '-'"));
            }
            let term_start = pos;
            while pos < chars.len() && !matches!(chars[pos].1, '+' | '-') {
                pos += 1;
            }
            if term_start == pos {
                let col = chars.get(pos).map(|c| c.0).unwrap_or(s.len() + 1);
                return Err(err(col, "missing term"));
            }
            let term: String = chars[term_start..pos].iter().map(|c| c.1).collect();
            let col = chars[term_start].0;
            let mut coeff: Option<BigRational> = None;
            let mut has_i = false;
            let mut has_r2 = false;
            for factor in term.split('*') {
                match factor {
                    "i" if !has_i => has_i = true,
                    "r2" if !has_r2 => has_r2 = true,
                    "" => return Err(err(col, "empty factor")),
                    num if coeff.is_none() => {
                        coeff =
                            Some(parse_fraction(num).ok_or_else(|| {
                                err(col, &format!("'{num}' is not a rational p/q"))
                            })?)
                    }
                    other => return Err(err(col, &format!("unexpected factor '{other}'"))),
                }
            }
            let mut q = coeff.unwrap_or_else(BigRational::one);
            if negative {
                q = -q;
            }
            let mut term = ExactScalar::zero();
            match (has_i, has_r2) {
                (false, false) => term.re = q,
                (true, false) => term.im = q,
                (false, true) => term.re_r2 = q,
                (true, true) => term.im_r2 = q,
            }
            acc = acc.add(&term);
        }
        Ok(acc)
    }
}

fn parse_fraction(s: &str) -> Option<BigRational> {
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let digits = |t: &str| !t.is_empty() && t.bytes().all(|b| b.is_ascii_digit());
    if !digits(n) || !digits(d) {
        return None;
    }
    let n: BigInt = n.parse().ok()?;
    let d: BigInt = d.parse().ok()?;
    if d.is_zero() {
        return None;
    }
    Some(BigRational::new(n, d))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(text: &str) -> ExactScalar {
        text.parse().unwrap()
    }

    #[test]
    fn add_examples() {
        assert_eq!(s("1/2").add(&s("1/2")), ExactScalar::one());
        assert_eq!(s("1/2*r2").add(&s("1/2*r2")), ExactScalar::sqrt2());
        let x = s("3/7 - 2*i + 5/3*r2");
        assert_eq!(x.add(&ExactScalar::zero()), x);
    }

    #[test]
    fn mul_examples() {
        let t = s("1/2*r2 + 1/2*r2*i");
        assert_eq!(t.mul(&t.conj()), ExactScalar::one());
        assert_eq!(
            ExactScalar::sqrt2().mul(&ExactScalar::sqrt2()),
            ExactScalar::from_int(2)
        );
        assert_eq!(
            ExactScalar::i().mul(&ExactScalar::i()),
            ExactScalar::from_int(-1)
        );
    }

    #[test]
    fn conj_examples() {
        assert_eq!(ExactScalar::i().conj(), ExactScalar::i().neg());
        assert_eq!(ExactScalar::sqrt2().conj(), ExactScalar::sqrt2());
        let x = s("1/3 + 2*i - 4*r2 + 1/9*i*r2");
        assert_eq!(x.conj().conj(), x);
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(
            ExactScalar::sqrt2().inverse().unwrap(),
            ExactScalar::inv_sqrt2()
        );
        assert_eq!(ExactScalar::from_int(2).inverse().unwrap(), s("1/2"));
        assert_eq!(
            ExactScalar::zero().inverse(),
            Err(ScalarError::DivisionByZero)
        );
        let x = s("1/3 + 2*i - 4*r2 + 1/9*i*r2");
        assert!(x.mul(&x.inverse().unwrap()).is_one());
    }

    #[test]
    fn to_complex_examples() {
        let v = ExactScalar::inv_sqrt2().to_complex().unwrap();
        assert!((v.re - std::f64::consts::FRAC_1_SQRT_2).abs() <= 1e-15 && v.im == 0.0);
        assert_eq!(
            ExactScalar::zero().to_complex().unwrap(),
            Complex64::new(0.0, 0.0)
        );
        let v = s("1/3").to_complex().unwrap();
        assert!((v.re - 0.3333333333333333).abs() <= 1e-15);
    }

    #[test]
    fn to_complex_overflow() {
        let huge = BigRational::from_integer(BigInt::from(10).pow(400));
        let x = ExactScalar::from_rational(huge);
        assert_eq!(x.to_complex(), Err(ScalarError::Overflow));
    }

    #[test]
    fn real_sign_and_order() {
        // 1 - √2/2 > 0, 1 - √2 < 0, 3 - 2√2 > 0
        assert_eq!(s("1 - 1/2*r2").real_signum(), Some(Ordering::Greater));
        assert_eq!(s("1 - r2").real_signum(), Some(Ordering::Less));
        assert_eq!(s("3 - 2*r2").real_signum(), Some(Ordering::Greater));
        assert_eq!(s("-3 + 2*r2").real_signum(), Some(Ordering::Less));
        assert_eq!(ExactScalar::i().real_signum(), None);
        assert_eq!(
            s("1/2").cmp_real(&ExactScalar::inv_sqrt2()),
            Some(Ordering::Less)
        );
    }

    #[test]
    fn parse_and_display() {
        let t = s("1/2*r2 + 1/2*r2*i");
        assert_eq!(t, ExactScalar::from_parts((0, 1), (0, 1), (1, 2), (1, 2)));
        assert_eq!(s(" - i "), ExactScalar::i().neg());
        assert_eq!(
            s("r2*i*3/4"),
            ExactScalar::from_parts((0, 1), (0, 1), (0, 1), (3, 4))
        );
        assert_eq!(s("2/4"), s("1/2"));
        for text in [
            "0",
            "1/2",
            "-i",
            "1/4 + 1/8*r2",
            "-3/5 - 2*i + r2 - 7/3*i*r2",
        ] {
            let x = s(text);
            assert_eq!(s(&x.to_string()), x);
        }
        assert_eq!(s("1/4 + 1/8*r2").to_string(), "1/4 + 1/8*r2");
    }

    #[test]
    fn parse_errors() {
        for bad in ["", "1/0", "0.5", "1/2*x", "1/2**i", "+", "1/2 +", "i*i"] {
            assert!(bad.parse::<ExactScalar>().is_err(), "{bad:?} should fail");
        }
    }

    #[test]
    fn digits() {
        assert_eq!(s("123/7").max_digits(), 3);
        assert_eq!(ExactScalar::zero().max_digits(), 1);
    }
}
