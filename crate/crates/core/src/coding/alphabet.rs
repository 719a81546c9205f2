use std::fmt;

use serde::{Deserialize, Serialize};

use super::{CodingError, Symbol};

/// Largest supported alphabet; symbols are stored as bytes.
pub const MAX_Q: usize = 256;

/// A finite alphabet `{0, .., q-1}`, optionally carrying the structure of
/// the field with `q` elements.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    q: usize,
    field: Option<Field>,
}

impl Alphabet {
    pub fn q(&self) -> usize {
        self.q
    }

    pub fn field(&self) -> Option<&Field> {
        self.field.as_ref()
    }

    pub fn is_field(&self) -> bool {
        self.field.is_some()
    }

    pub fn require_field(&self) -> Result<&Field, CodingError> {
        self.field.as_ref().ok_or(CodingError::NotAField(self.q))
    }
}

impl fmt::Display for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.field {
            Some(_) => write!(f, "F_{}", self.q),
            None => write!(f, "A_{}", self.q),
        }
    }
}

/// Builds a plain alphabet of size `q`, or the field `F_q` if `want_field`.
///
/// Field elements are integers `sum a_i p^i` standing for `sum a_i alpha^i`,
/// where `alpha` is a root of the modulus. The modulus is the smallest monic
/// irreducible polynomial of degree `k` (coefficients read as a base-`p`
/// number): `x^2+x+1` for `F_4`, `x^3+x+1` for `F_8`, `x^2+1` for `F_9`.
pub fn make_alphabet(q: usize, want_field: bool) -> Result<Alphabet, CodingError> {
    if q < 2 {
        return Err(CodingError::AlphabetTooSmall(q));
    }
    if q > MAX_Q {
        return Err(CodingError::AlphabetTooLarge(q));
    }
    let field = if want_field {
        let (p, k) = prime_power(q).ok_or(CodingError::NotAPrimePower(q))?;
        Some(Field::new(p, k))
    } else {
        None
    };
    Ok(Alphabet { q, field })
}

/// `(p, k)` with `q = p^k`, if `q` is a prime power.
pub fn prime_power(q: usize) -> Option<(usize, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q % d == 0)?;
    let mut rest = q;
    let mut k = 0;
    while rest % p == 0 {
        rest /= p;
        k += 1;
    }
    (rest == 1).then_some((p, k))
}

/// Arithmetic tables of `F_{p^k}`.
#[derive(Clone, PartialEq, Eq)]
pub struct Field {
    p: usize,
    k: u32,
    /// Coefficients of the monic modulus, lowest degree first (length k+1).
    modulus: Vec<usize>,
    add: Vec<Symbol>,
    mul: Vec<Symbol>,
    neg: Vec<Symbol>,
    inv: Vec<Symbol>,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Field")
            .field("p", &self.p)
            .field("k", &self.k)
            .field("modulus", &self.modulus)
            .finish()
    }
}

impl Field {
    fn new(p: usize, k: u32) -> Field {
        let q = p.pow(k);
        let modulus = if k == 1 { vec![0, 1] } else { smallest_irreducible(p, k as usize) };
        let digits = |x: usize| -> Vec<usize> {
            let mut d = vec![0; k as usize];
            let mut x = x;
            for slot in d.iter_mut() {
                *slot = x % p;
                x /= p;
            }
            d
        };
        let undigits = |d: &[usize]| d.iter().rev().fold(0, |acc, &c| acc * p + c);
        let mut add = vec![0; q * q];
        let mut mul = vec![0; q * q];
        for a in 0..q {
            let da = digits(a);
            for b in 0..q {
                let db = digits(b);
                let sum: Vec<usize> = da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();
                add[a * q + b] = undigits(&sum) as Symbol;
                let prod = poly_mulmod(&da, &db, &modulus, p);
                mul[a * q + b] = undigits(&prod) as Symbol;
            }
        }
        let mut neg = vec![0; q];
        let mut inv = vec![0; q];
        for a in 0..q {
            neg[a] = (0..q).find(|&b| add[a * q + b] == 0).expect("additive inverse") as Symbol;
            if a != 0 {
                inv[a] = (1..q).find(|&b| mul[a * q + b] == 1).expect("field inverse") as Symbol;
            }
        }
        Field { p, k, modulus, add, mul, neg, inv }
    }

    pub fn q(&self) -> usize {
        self.p.pow(self.k)
    }

    pub fn characteristic(&self) -> usize {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.k
    }

    /// Monic modulus, lowest-degree coefficient first.
    pub fn modulus(&self) -> &[usize] {
        &self.modulus
    }

    #[inline]
    pub fn add(&self, a: Symbol, b: Symbol) -> Symbol {
        self.add[a as usize * self.q() + b as usize]
    }

    #[inline]
    pub fn mul(&self, a: Symbol, b: Symbol) -> Symbol {
        self.mul[a as usize * self.q() + b as usize]
    }

    pub fn neg(&self, a: Symbol) -> Symbol {
        self.neg[a as usize]
    }

    pub fn sub(&self, a: Symbol, b: Symbol) -> Symbol {
        self.add(a, self.neg(b))
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self, a: Symbol) -> Option<Symbol> {
        (a != 0).then(|| self.inv[a as usize])
    }

    /// `sum_i coeffs[i] * xs[i]`.
    pub fn dot(&self, coeffs: &[Symbol], xs: &[Symbol]) -> Symbol {
        coeffs.iter().zip(xs).fold(0, |acc, (&c, &x)| self.add(acc, self.mul(c, x)))
    }
}

fn poly_mulmod(a: &[usize], b: &[usize], modulus: &[usize], p: usize) -> Vec<usize> {
    let k = modulus.len() - 1;
    let mut prod = vec![0; 2 * k.max(1)];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    for d in (k..prod.len()).rev() {
        let c = prod[d];
        if c == 0 {
            continue;
        }
        // subtract c * x^(d-k) * modulus (monic)
        for (i, &m) in modulus.iter().enumerate() {
            prod[d - k + i] = (prod[d - k + i] + p * p - c * m % p) % p;
        }
    }
    prod.truncate(k);
    prod
}

fn smallest_irreducible(p: usize, k: usize) -> Vec<usize> {
    let count = p.pow(k as u32);
    (0..count)
        .map(|code| {
            let mut poly = Vec::with_capacity(k + 1);
            let mut c = code;
            for _ in 0..k {
                poly.push(c % p);
                c /= p;
            }
            poly.push(1);
            poly
        })
        .find(|poly| is_irreducible(poly, p))
        .expect("irreducible polynomials exist in every degree")
}

fn is_irreducible(poly: &[usize], p: usize) -> bool {
    let k = poly.len() - 1;
    for d in 1..=k / 2 {
        for code in 0..p.pow(d as u32) {
            let mut divisor = Vec::with_capacity(d + 1);
            let mut c = code;
            for _ in 0..d {
                divisor.push(c % p);
                c /= p;
            }
            divisor.push(1);
            if poly_rem_is_zero(poly, &divisor, p) {
                return false;
            }
        }
    }
    true
}

fn poly_rem_is_zero(poly: &[usize], divisor: &[usize], p: usize) -> bool {
    let mut rem = poly.to_vec();
    let d = divisor.len() - 1;
    for top in (d..rem.len()).rev() {
        let c = rem[top];
        if c == 0 {
            continue;
        }
        for (i, &m) in divisor.iter().enumerate() {
            rem[top - d + i] = (rem[top - d + i] + p * p - c * m % p) % p;
        }
    }
    rem[..d].iter().all(|&c| c == 0)
}

/// Serialized alphabet description used in certificate files.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlphabetSpec {
    pub q: usize,
    pub structure: Structure,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulus: Option<Vec<usize>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Structure {
    Plain,
    Field,
}

impl Alphabet {
    pub fn spec(&self) -> AlphabetSpec {
        AlphabetSpec {
            q: self.q,
            structure: if self.is_field() { Structure::Field } else { Structure::Plain },
            modulus: self.field.as_ref().map(|f| f.modulus.clone()),
        }
    }

    pub fn from_spec(spec: &AlphabetSpec) -> Result<Alphabet, CodingError> {
        let a = make_alphabet(spec.q, spec.structure == Structure::Field)?;
        if let (Some(f), Some(m)) = (&a.field, &spec.modulus) {
            if &f.modulus != m {
                return Err(CodingError::UnsupportedModulus { q: spec.q, modulus: m.clone() });
            }
        }
        Ok(a)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_axioms(f: &Field) {
        let q = f.q();
        let all: Vec<Symbol> = (0..q).map(|x| x as Symbol).collect();
        for &a in &all {
            assert_eq!(f.add(a, 0), a);
            assert_eq!(f.mul(a, 1), a);
            assert_eq!(f.add(a, f.neg(a)), 0);
            if a != 0 {
                assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
            }
            for &b in &all {
                assert_eq!(f.add(a, b), f.add(b, a));
                assert_eq!(f.mul(a, b), f.mul(b, a));
                for &c in &all {
                    assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
                    assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                    assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                }
            }
        }
    }

    #[test]
    fn field_axioms_small_q() {
        for q in [2, 3, 4, 5, 7, 8, 9] {
            let a = make_alphabet(q, true).unwrap();
            check_axioms(a.field().unwrap());
        }
    }

    #[test]
    fn fixed_moduli() {
        let modulus = |q| make_alphabet(q, true).unwrap().field().unwrap().modulus().to_vec();
        assert_eq!(modulus(4), [1, 1, 1]);
        assert_eq!(modulus(8), [1, 1, 0, 1]);
        assert_eq!(modulus(9), [1, 0, 1]);
    }

    #[test]
    fn f4_alpha() {
        // alpha = 2, alpha + 1 = 3, alpha^2 = alpha + 1
        let a = make_alphabet(4, true).unwrap();
        let f = a.field().unwrap();
        assert_eq!(f.mul(2, 2), 3);
        assert_eq!(f.add(2, 1), 3);
        assert_eq!(f.mul(2, 3), 1);
    }

    #[test]
    fn errors() {
        assert_eq!(make_alphabet(6, true), Err(CodingError::NotAPrimePower(6)));
        assert_eq!(make_alphabet(1, false), Err(CodingError::AlphabetTooSmall(1)));
        let plain = make_alphabet(6, false).unwrap();
        assert_eq!(plain.q(), 6);
        assert!(!plain.is_field());
        assert!(plain.require_field().is_err());
    }

    #[test]
    fn prime_powers() {
        assert_eq!(prime_power(8), Some((2, 3)));
        assert_eq!(prime_power(9), Some((3, 2)));
        assert_eq!(prime_power(7), Some((7, 1)));
        assert_eq!(prime_power(12), None);
        assert_eq!(prime_power(1), None);
    }

    #[test]
    fn spec_round_trip() {
        for (q, field) in [(4, true), (6, false), (9, true)] {
            let a = make_alphabet(q, field).unwrap();
            assert_eq!(Alphabet::from_spec(&a.spec()).unwrap(), a);
        }
        let mut spec = make_alphabet(4, true).unwrap().spec();
        spec.modulus = Some(vec![1, 0, 1]);
        assert!(Alphabet::from_spec(&spec).is_err());
    }
}
