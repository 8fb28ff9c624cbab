use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, Neg, Sub};

/// Maximum number of variables supported anywhere in the crate.
pub const MAX_VARS: usize = 3;

/// Exponent tuple for one, two or three variables.
///
/// Entries are signed so the same type indexes both analytic polynomials
/// (nonnegative entries) and Laurent expansions on the torus.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct MultiIndex {
    len: u8,
    e: [i32; MAX_VARS],
}

impl MultiIndex {
    pub fn new(entries: &[i32]) -> Self {
        assert!(
            !entries.is_empty() && entries.len() <= MAX_VARS,
            "multi-index length must be 1..=3"
        );
        let mut e = [0; MAX_VARS];
        e[..entries.len()].copy_from_slice(entries);
        Self { len: entries.len() as u8, e }
    }

    pub fn zero(nvars: usize) -> Self {
        Self::new(&[0, 0, 0][..nvars])
    }

    /// Unit vector in direction `var`.
    pub fn unit(nvars: usize, var: usize) -> Self {
        let mut m = Self::zero(nvars);
        m.e[var] = 1;
        m
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len as usize
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn as_slice(&self) -> &[i32] {
        &self.e[..self.len()]
    }

    #[inline]
    pub fn get(&self, var: usize) -> i32 {
        self.as_slice()[var]
    }

    pub fn with(&self, var: usize, value: i32) -> Self {
        let mut m = *self;
        assert!(var < self.len());
        m.e[var] = value;
        m
    }

    /// Drops or appends trailing variables (new entries are 0).
    pub fn resize(&self, nvars: usize) -> Self {
        let mut e = [0; MAX_VARS];
        let k = nvars.min(self.len());
        e[..k].copy_from_slice(&self.e[..k]);
        Self::new(&e[..nvars])
    }

    pub fn is_nonnegative(&self) -> bool {
        self.as_slice().iter().all(|&x| x >= 0)
    }

    /// Componentwise `self <= other`.
    pub fn le_box(&self, other: &Self) -> bool {
        debug_assert_eq!(self.len, other.len);
        self.as_slice()
            .iter()
            .zip(other.as_slice())
            .all(|(a, b)| a <= b)
    }

    /// Componentwise `0 <= self <= bound`.
    pub fn in_box(&self, bound: &Self) -> bool {
        self.is_nonnegative() && self.le_box(bound)
    }

    pub fn max_abs(&self) -> i32 {
        self.as_slice().iter().map(|x| x.abs()).max().unwrap_or(0)
    }

    /// Number of lattice points in the box `[0, self]`.
    pub fn box_size(&self) -> usize {
        self.as_slice()
            .iter()
            .map(|&d| if d < 0 { 0 } else { d as usize + 1 })
            .product()
    }

    /// All indices in `[0, self]`, lexicographic order.
    pub fn box_iter(&self) -> BoxIter {
        BoxIter::new(&MultiIndex::zero(self.len()), self)
    }

    /// All indices in `[-self, self]`, lexicographic order.
    pub fn symmetric_box_iter(&self) -> BoxIter {
        BoxIter::new(&-*self, self)
    }

    fn zip_with(&self, other: &Self, f: impl Fn(i32, i32) -> i32) -> Self {
        assert_eq!(self.len, other.len, "multi-index length mismatch");
        let mut m = *self;
        for i in 0..self.len() {
            m.e[i] = f(self.e[i], other.e[i]);
        }
        m
    }

    pub fn sup(&self, other: &Self) -> Self {
        self.zip_with(other, i32::max)
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.as_slice().cmp(other.as_slice())
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add for MultiIndex {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        self.zip_with(&rhs, |a, b| a + b)
    }
}

impl Sub for MultiIndex {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self.zip_with(&rhs, |a, b| a - b)
    }
}

impl Neg for MultiIndex {
    type Output = Self;
    fn neg(self) -> Self {
        let mut m = self;
        for x in m.e.iter_mut() {
            *x = -*x;
        }
        m
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.as_slice())
    }
}

/// Lexicographic iterator over an integer box `[lo, hi]`.
pub struct BoxIter {
    lo: MultiIndex,
    hi: MultiIndex,
    next: Option<MultiIndex>,
}

impl BoxIter {
    pub fn new(lo: &MultiIndex, hi: &MultiIndex) -> Self {
        let empty = lo.as_slice().iter().zip(hi.as_slice()).any(|(a, b)| a > b);
        Self {
            lo: *lo,
            hi: *hi,
            next: if empty { None } else { Some(*lo) },
        }
    }
}

impl Iterator for BoxIter {
    type Item = MultiIndex;

    fn next(&mut self) -> Option<MultiIndex> {
        let cur = self.next?;
        let mut n = cur;
        let mut i = n.len();
        loop {
            if i == 0 {
                self.next = None;
                break;
            }
            i -= 1;
            if n.e[i] < self.hi.e[i] {
                n.e[i] += 1;
                self.next = Some(n);
                break;
            }
            n.e[i] = self.lo.e[i];
        }
        Some(cur)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;

    #[test]
    fn box_iteration_is_lexicographic() {
        let d = MultiIndex::new(&[1, 2]);
        let all: Vec<_> = d.box_iter().collect();
        assert_eq!(all.len(), d.box_size());
        assert!(all.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(all[0], MultiIndex::new(&[0, 0]));
        assert_eq!(all[5], MultiIndex::new(&[1, 2]));
    }

    #[test]
    fn negative_box_is_empty() {
        let d = MultiIndex::new(&[2, -1, 1]);
        assert_eq!(d.box_size(), 0);
        assert_eq!(d.box_iter().count(), 0);
    }

    #[test]
    fn symmetric_box() {
        let d = MultiIndex::new(&[1, 1]);
        assert_eq!(d.symmetric_box_iter().count(), 9);
    }
}
