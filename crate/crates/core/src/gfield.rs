//! Finite-field arithmetic and dense linear algebra over GF(q).
//!
//! Two representations are supported: prime fields GF(p) with arithmetic
//! mod p, and binary extension fields GF(2^d) with log/antilog tables over
//! a fixed primitive polynomial per degree. Either way q <= 65536, elements
//! are canonical integers in [0, q), and extension-field values pack the
//! polynomial coefficients little-endian (bit i is the coefficient of x^i).

use rand::Rng;

use crate::error::{Error, Result};

/// Primitive polynomial for GF(2^d), indexed by d - 1. Bit i is the
/// coefficient of x^i. These are the standard minimal-weight primitive
/// polynomials; primitivity is verified exhaustively in the tests.
const BINARY_POLYS: [u32; 16] = [
    0x3,     // x + 1
    0x7,     // x^2 + x + 1
    0xB,     // x^3 + x + 1
    0x13,    // x^4 + x + 1
    0x25,    // x^5 + x^2 + 1
    0x43,    // x^6 + x + 1
    0x89,    // x^7 + x^3 + 1
    0x11D,   // x^8 + x^4 + x^3 + x^2 + 1
    0x211,   // x^9 + x^4 + 1
    0x409,   // x^10 + x^3 + 1
    0x805,   // x^11 + x^2 + 1
    0x1053,  // x^12 + x^6 + x^4 + x + 1
    0x201B,  // x^13 + x^4 + x^3 + x + 1
    0x4443,  // x^14 + x^10 + x^6 + x + 1
    0x8003,  // x^15 + x + 1
    0x1100B, // x^16 + x^12 + x^3 + x + 1
];

/// An element of a finite field, stored as its canonical integer
/// representative in [0, q). Equality is integer equality; all arithmetic
/// goes through the owning [`FieldSpec`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct FieldElement(u16);

impl FieldElement {
    pub fn value(self) -> u64 {
        self.0 as u64
    }
}

impl std::fmt::Display for FieldElement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

enum Rep {
    Prime,
    Binary {
        poly: u32,
        /// exp[i] = x^i for i in [0, 2(q-1)); doubled so mul skips a mod.
        exp: Vec<u16>,
        /// log[v] = discrete log of v base x, for v in [1, q).
        log: Vec<u16>,
    },
}

/// A finite field GF(q): either GF(p) for a prime p or GF(2^d), q <= 65536.
pub struct FieldSpec {
    order: u64,
    characteristic: u64,
    degree: u32,
    rep: Rep,
}

impl std::fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.rep {
            Rep::Prime => write!(f, "FieldSpec(GF({}))", self.order),
            Rep::Binary { poly, .. } => {
                write!(f, "FieldSpec(GF(2^{}), poly {:#x})", self.degree, poly)
            }
        }
    }
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        self.order == other.order
    }
}
impl Eq for FieldSpec {}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

impl FieldSpec {
    /// Builds the field of the given order. Supported orders are primes and
    /// powers of two, both up to 65536.
    pub fn new(order: u64) -> Result<Self> {
        if !Self::supported(order) {
            return Err(Error::UnsupportedField(order));
        }
        if order.is_power_of_two() && order > 2 {
            let degree = order.trailing_zeros();
            let poly = BINARY_POLYS[(degree - 1) as usize];
            let q = order as usize;
            let mut exp = vec![0u16; 2 * (q - 1)];
            let mut log = vec![0u16; q];
            let mut x: u32 = 1;
            for i in 0..q - 1 {
                exp[i] = x as u16;
                log[x as usize] = i as u16;
                x <<= 1;
                if x & (1 << degree) != 0 {
                    x ^= poly;
                }
            }
            // The polynomial is primitive, so x cycles back to 1 exactly here.
            debug_assert_eq!(x, 1);
            for i in q - 1..2 * (q - 1) {
                exp[i] = exp[i - (q - 1)];
            }
            Ok(FieldSpec {
                order,
                characteristic: 2,
                degree,
                rep: Rep::Binary { poly, exp, log },
            })
        } else {
            Ok(FieldSpec {
                order,
                characteristic: order,
                degree: 1,
                rep: Rep::Prime,
            })
        }
    }

    /// Whether `order` names a supported field (prime or power of two, <= 65536).
    pub fn supported(order: u64) -> bool {
        order >= 2 && order <= 65536 && (is_prime(order) || order.is_power_of_two())
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn characteristic(&self) -> u64 {
        self.characteristic
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    /// The defining polynomial for extension fields, bit i = coefficient of x^i.
    pub fn polynomial(&self) -> Option<u32> {
        match &self.rep {
            Rep::Prime => None,
            Rep::Binary { poly, .. } => Some(*poly),
        }
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement(0)
    }

    pub fn one(&self) -> FieldElement {
        FieldElement(1)
    }

    /// The element with canonical representative `value`.
    pub fn element(&self, value: u64) -> Result<FieldElement> {
        if value < self.order {
            Ok(FieldElement(value as u16))
        } else {
            Err(Error::ElementOutOfRange {
                value,
                order: self.order,
            })
        }
    }

    /// All elements in canonical order, 0..q.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + '_ {
        (0..self.order).map(|v| FieldElement(v as u16))
    }

    pub fn add(&self, x: FieldElement, y: FieldElement) -> FieldElement {
        match &self.rep {
            Rep::Prime => {
                let s = x.0 as u32 + y.0 as u32;
                let p = self.order as u32;
                FieldElement(if s >= p { (s - p) as u16 } else { s as u16 })
            }
            Rep::Binary { .. } => FieldElement(x.0 ^ y.0),
        }
    }

    pub fn sub(&self, x: FieldElement, y: FieldElement) -> FieldElement {
        match &self.rep {
            Rep::Prime => {
                let p = self.order as u32;
                let d = x.0 as u32 + p - y.0 as u32;
                FieldElement(if d >= p { (d - p) as u16 } else { d as u16 })
            }
            Rep::Binary { .. } => FieldElement(x.0 ^ y.0),
        }
    }

    pub fn neg(&self, x: FieldElement) -> FieldElement {
        self.sub(self.zero(), x)
    }

    pub fn mul(&self, x: FieldElement, y: FieldElement) -> FieldElement {
        match &self.rep {
            Rep::Prime => FieldElement(((x.0 as u64 * y.0 as u64) % self.order) as u16),
            Rep::Binary { exp, log, .. } => {
                if x.0 == 0 || y.0 == 0 {
                    FieldElement(0)
                } else {
                    FieldElement(exp[log[x.0 as usize] as usize + log[y.0 as usize] as usize])
                }
            }
        }
    }

    /// Multiplicative inverse. Errors on zero.
    pub fn invert(&self, x: FieldElement) -> Result<FieldElement> {
        if x.0 == 0 {
            return Err(Error::ZeroInversion(self.order));
        }
        match &self.rep {
            Rep::Prime => {
                // Extended Euclid on (p, x).
                let p = self.order as i64;
                let (mut r0, mut r1) = (p, x.0 as i64);
                let (mut t0, mut t1) = (0i64, 1i64);
                while r1 != 0 {
                    let q = r0 / r1;
                    (r0, r1) = (r1, r0 - q * r1);
                    (t0, t1) = (t1, t0 - q * t1);
                }
                debug_assert_eq!(r0, 1);
                Ok(FieldElement(t0.rem_euclid(p) as u16))
            }
            Rep::Binary { exp, log, .. } => {
                let n = self.order as usize - 1;
                Ok(FieldElement(exp[n - log[x.0 as usize] as usize]))
            }
        }
    }

    pub fn div(&self, x: FieldElement, y: FieldElement) -> Result<FieldElement> {
        Ok(self.mul(x, self.invert(y)?))
    }

    /// Draws one element uniformly from the field. Deterministic given the
    /// RNG state; each element has probability exactly 1/q.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> FieldElement {
        FieldElement(rng.gen_range(0..self.order as u32) as u16)
    }
}

/// A dense row-major matrix over a finite field. The field is passed to the
/// operations rather than stored, so matrices stay plain data.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatrixGF {
    rows: usize,
    cols: usize,
    entries: Vec<FieldElement>,
}

impl MatrixGF {
    pub fn zero(rows: usize, cols: usize) -> Self {
        MatrixGF {
            rows,
            cols,
            entries: vec![FieldElement(0); rows * cols],
        }
    }

    pub fn identity(n: usize, field: &FieldSpec) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m.set(i, i, field.one());
        }
        m
    }

    /// Builds a matrix from rows. All rows must have equal length.
    pub fn from_rows(rows: Vec<Vec<FieldElement>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::InvalidArgument(
                "matrix rows have unequal lengths".into(),
            ));
        }
        Ok(MatrixGF {
            rows: r,
            cols: c,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    /// Builds a matrix from columns of equal length.
    pub fn from_columns(columns: &[Vec<FieldElement>]) -> Result<Self> {
        let c = columns.len();
        let r = columns.first().map_or(0, Vec::len);
        if columns.iter().any(|col| col.len() != r) {
            return Err(Error::InvalidArgument(
                "matrix columns have unequal lengths".into(),
            ));
        }
        let mut m = Self::zero(r, c);
        for (j, col) in columns.iter().enumerate() {
            for (i, &v) in col.iter().enumerate() {
                m.set(i, j, v);
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> FieldElement {
        self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: FieldElement) {
        self.entries[i * self.cols + j] = v;
    }

    /// Rank over GF(q) by exact Gaussian elimination. The matrix itself is
    /// not modified.
    pub fn rank(&self, field: &FieldSpec) -> usize {
        let mut work = self.entries.clone();
        let (rows, cols) = (self.rows, self.cols);
        let at = |w: &Vec<FieldElement>, i: usize, j: usize| w[i * cols + j];
        let mut rank = 0;
        for col in 0..cols {
            if rank == rows {
                break;
            }
            let pivot = (rank..rows).find(|&i| at(&work, i, col).0 != 0);
            let Some(pivot) = pivot else { continue };
            if pivot != rank {
                for j in 0..cols {
                    work.swap(rank * cols + j, pivot * cols + j);
                }
            }
            let inv = field
                .invert(at(&work, rank, col))
                .expect("pivot is nonzero");
            for i in rank + 1..rows {
                let factor = field.mul(at(&work, i, col), inv);
                if factor.0 == 0 {
                    continue;
                }
                for j in col..cols {
                    let delta = field.mul(factor, at(&work, rank, j));
                    work[i * cols + j] = field.sub(at(&work, i, j), delta);
                }
            }
            rank += 1;
        }
        rank
    }
}
