//! Frames of discernment, bitmask subsets and the fast subset-lattice transforms.
//!
//! Element `i` of a frame maps to bit `i` of a [`SubsetIndex`], so a frame of
//! `n` elements has subsets `0..2^n`, with `0` the empty set and `2^n - 1` the
//! whole frame. Every set function on the frame is a [`LatticeVector`] of
//! length `2^n` indexed the same way.

use std::fmt;
use std::sync::Arc;

use crate::error::{BeliefError, Result};

/// Largest frame accepted for vector algebra.
pub const DEFAULT_CAP_TRANSFORM: usize = 20;
/// Largest frame accepted for dense `2^n x 2^n` matrix work.
pub const DEFAULT_CAP_MATRIX: usize = 10;

/// Size limits attached to a frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Caps {
    pub transform: usize,
    pub matrix: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            transform: DEFAULT_CAP_TRANSFORM,
            matrix: DEFAULT_CAP_MATRIX,
        }
    }
}

/// A finite frame of discernment: an ordered list of distinct labels.
///
/// Cloning is cheap; labels are shared. Two frames are equal when their
/// labels are equal in the same order (caps are not compared).
#[derive(Clone)]
pub struct Frame {
    labels: Arc<[String]>,
    caps: Caps,
}

impl Frame {
    pub fn new<S: AsRef<str>>(labels: &[S]) -> Result<Self> {
        Self::with_caps(labels, Caps::default())
    }

    pub fn with_caps<S: AsRef<str>>(labels: &[S], caps: Caps) -> Result<Self> {
        if labels.is_empty() {
            return Err(BeliefError::InvalidFrame("frame needs at least one element".into()));
        }
        if labels.len() > caps.transform {
            return Err(BeliefError::FrameTooLarge {
                n: labels.len(),
                cap: caps.transform,
            });
        }
        // u32 bitmasks
        if labels.len() > 31 {
            return Err(BeliefError::FrameTooLarge { n: labels.len(), cap: 31 });
        }
        let mut owned: Vec<String> = Vec::with_capacity(labels.len());
        for l in labels {
            let l = l.as_ref();
            if l.is_empty() {
                return Err(BeliefError::InvalidFrame("empty label".into()));
            }
            if l.contains('|') {
                return Err(BeliefError::InvalidFrame(format!("label {l:?} contains '|'")));
            }
            if owned.iter().any(|o| o == l) {
                return Err(BeliefError::InvalidFrame(format!("duplicate label {l:?}")));
            }
            owned.push(l.to_string());
        }
        Ok(Frame {
            labels: owned.into(),
            caps,
        })
    }

    /// Frame of `n` elements labelled `a, b, c, ...` (or `e0, e1, ...` past 26).
    pub fn of_size(n: usize) -> Result<Self> {
        let labels: Vec<String> = (0..n)
            .map(|i| {
                if n <= 26 {
                    ((b'a' + i as u8) as char).to_string()
                } else {
                    format!("e{i}")
                }
            })
            .collect();
        Self::new(&labels)
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn caps(&self) -> Caps {
        self.caps
    }

    /// Number of elements `n`.
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Number of subsets, `2^n`.
    pub fn size(&self) -> usize {
        1usize << self.labels.len()
    }

    pub fn empty(&self) -> SubsetIndex {
        SubsetIndex(0)
    }

    pub fn full(&self) -> SubsetIndex {
        SubsetIndex((self.size() - 1) as u32)
    }

    pub fn contains(&self, a: SubsetIndex) -> bool {
        (a.0 as usize) < self.size()
    }

    /// Validates `bits` against this frame.
    pub fn subset(&self, bits: u32) -> Result<SubsetIndex> {
        let a = SubsetIndex(bits);
        self.check(a)?;
        Ok(a)
    }

    pub fn check(&self, a: SubsetIndex) -> Result<()> {
        if self.contains(a) {
            Ok(())
        } else {
            Err(BeliefError::SubsetOutOfRange {
                bits: a.0,
                n: self.len(),
            })
        }
    }

    pub fn check_matrix_cap(&self) -> Result<()> {
        if self.len() > self.caps.matrix {
            Err(BeliefError::FrameTooLarge {
                n: self.len(),
                cap: self.caps.matrix,
            })
        } else {
            Ok(())
        }
    }

    pub fn ensure_same(&self, other: &Frame) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(BeliefError::FrameMismatch)
        }
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Subset made of the given labels, in any order.
    pub fn subset_of<S: AsRef<str>>(&self, labels: &[S]) -> Result<SubsetIndex> {
        let mut bits = 0u32;
        for l in labels {
            let l = l.as_ref();
            let i = self
                .index_of(l)
                .ok_or_else(|| BeliefError::InvalidFrame(format!("unknown label {l:?}")))?;
            bits |= 1 << i;
        }
        Ok(SubsetIndex(bits))
    }

    pub fn union(&self, a: SubsetIndex, b: SubsetIndex) -> Result<SubsetIndex> {
        self.check(a)?;
        self.check(b)?;
        Ok(a.union(b))
    }

    pub fn intersection(&self, a: SubsetIndex, b: SubsetIndex) -> Result<SubsetIndex> {
        self.check(a)?;
        self.check(b)?;
        Ok(a.intersection(b))
    }

    pub fn is_subset(&self, a: SubsetIndex, b: SubsetIndex) -> Result<bool> {
        self.check(a)?;
        self.check(b)?;
        Ok(a.is_subset_of(b))
    }

    /// Complement within the frame. Out-of-range bits are dropped.
    pub fn complement(&self, a: SubsetIndex) -> SubsetIndex {
        SubsetIndex(!a.0 & self.full().0)
    }

    /// Canonical key: labels joined by `|` in frame order, `""` for the empty set.
    pub fn key(&self, a: SubsetIndex) -> String {
        self.members(a).collect::<Vec<_>>().join("|")
    }

    /// Parses a `|`-separated key. Labels may come in any order.
    pub fn parse_key(&self, key: &str) -> Result<SubsetIndex> {
        if key.is_empty() {
            return Ok(self.empty());
        }
        let parts: Vec<&str> = key.split('|').collect();
        let a = self.subset_of(&parts)?;
        if a.len() != parts.len() {
            return Err(BeliefError::InvalidFrame(format!("repeated label in key {key:?}")));
        }
        Ok(a)
    }

    /// Human-readable form: `∅`, `Ω`, or `{a,b}`.
    pub fn display(&self, a: SubsetIndex) -> String {
        if a.is_empty() {
            "∅".to_string()
        } else if a == self.full() {
            "Ω".to_string()
        } else {
            format!("{{{}}}", self.members(a).collect::<Vec<_>>().join(","))
        }
    }

    fn members(&self, a: SubsetIndex) -> impl Iterator<Item = &str> + '_ {
        self.labels
            .iter()
            .enumerate()
            .filter(move |(i, _)| a.0 >> i & 1 == 1)
            .map(|(_, l)| l.as_str())
    }

    /// All subsets in index order.
    pub fn subsets(&self) -> impl Iterator<Item = SubsetIndex> {
        (0..self.size() as u32).map(SubsetIndex)
    }
}

impl PartialEq for Frame {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.labels, &other.labels) || self.labels == other.labels
    }
}

impl Eq for Frame {}

impl fmt::Debug for Frame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Frame{:?}", &*self.labels)
    }
}

/// A subset of a frame as a bitmask: bit `i` set iff element `i` is present.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct SubsetIndex(pub u32);

impl SubsetIndex {
    pub const EMPTY: SubsetIndex = SubsetIndex(0);

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn union(self, other: Self) -> Self {
        SubsetIndex(self.0 | other.0)
    }

    pub fn intersection(self, other: Self) -> Self {
        SubsetIndex(self.0 & other.0)
    }

    pub fn difference(self, other: Self) -> Self {
        SubsetIndex(self.0 & !other.0)
    }

    pub fn is_subset_of(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn intersects(self, other: Self) -> bool {
        self.0 & other.0 != 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    /// Cardinality.
    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    /// All subsets of `self`, in increasing index order.
    pub fn submasks(self) -> Submasks {
        Submasks {
            mask: self.0,
            next: Some(0),
        }
    }
}

/// Iterator over the subsets of a mask.
pub struct Submasks {
    mask: u32,
    next: Option<u32>,
}

impl Iterator for Submasks {
    type Item = SubsetIndex;

    fn next(&mut self) -> Option<SubsetIndex> {
        let cur = self.next?;
        // next submask in increasing order: ((cur | !mask) + 1) & mask
        self.next = if cur == self.mask {
            None
        } else {
            Some((cur | !self.mask).wrapping_add(1) & self.mask)
        };
        Some(SubsetIndex(cur))
    }
}

/// A real-valued function on the subsets of a frame.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeVector {
    frame: Frame,
    values: Vec<f64>,
}

impl LatticeVector {
    pub fn new(frame: Frame, values: Vec<f64>) -> Result<Self> {
        if values.len() != frame.size() {
            return Err(BeliefError::LengthMismatch {
                expected: frame.size(),
                got: values.len(),
            });
        }
        Ok(LatticeVector { frame, values })
    }

    pub fn zeros(frame: &Frame) -> Self {
        LatticeVector {
            values: vec![0.0; frame.size()],
            frame: frame.clone(),
        }
    }

    pub fn constant(frame: &Frame, c: f64) -> Self {
        LatticeVector {
            values: vec![c; frame.size()],
            frame: frame.clone(),
        }
    }

    /// 1 at `a`, 0 elsewhere.
    pub fn indicator(frame: &Frame, a: SubsetIndex) -> Result<Self> {
        frame.check(a)?;
        let mut v = Self::zeros(frame);
        v.values[a.index()] = 1.0;
        Ok(v)
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn get(&self, a: SubsetIndex) -> f64 {
        self.values[a.index()]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        LatticeVector {
            frame: self.frame.clone(),
            values: self.values.iter().map(|&x| f(x)).collect(),
        }
    }

    /// Elementwise combination of two vectors on the same frame.
    pub fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        self.frame.ensure_same(&other.frame)?;
        Ok(LatticeVector {
            frame: self.frame.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    /// Largest absolute elementwise difference.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        max_abs_diff(&self.values, &other.values)
    }

    fn transformed(&self, t: fn(&mut [f64])) -> Self {
        let mut values = self.values.clone();
        t(&mut values);
        LatticeVector {
            frame: self.frame.clone(),
            values,
        }
    }
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Per-bit butterfly over a power-of-two slice: calls `op(lo, hi)` for every
/// pair of indices differing only in one bit, `lo` lacking the bit.
fn sweep(xs: &mut [f64], op: impl Fn(&mut f64, &mut f64)) {
    debug_assert!(xs.len().is_power_of_two());
    let mut half = 1;
    while half < xs.len() {
        for block in xs.chunks_exact_mut(2 * half) {
            let (lo, hi) = block.split_at_mut(half);
            for (l, h) in lo.iter_mut().zip(hi) {
                op(l, h);
            }
        }
        half <<= 1;
    }
}

/// `g(A) = Σ_{B⊆A} f(B)` in place.
pub fn zeta_subsets_in_place(xs: &mut [f64]) {
    sweep(xs, |l, h| *h += *l);
}

/// Inverse of [`zeta_subsets_in_place`].
pub fn mobius_subsets_in_place(xs: &mut [f64]) {
    sweep(xs, |l, h| *h -= *l);
}

/// `g(A) = Σ_{B⊇A} f(B)` in place.
pub fn zeta_supersets_in_place(xs: &mut [f64]) {
    sweep(xs, |l, h| *l += *h);
}

/// Inverse of [`zeta_supersets_in_place`].
pub fn mobius_supersets_in_place(xs: &mut [f64]) {
    sweep(xs, |l, h| *l -= *h);
}

pub fn zeta_subsets(f: &LatticeVector) -> LatticeVector {
    f.transformed(zeta_subsets_in_place)
}

pub fn zeta_supersets(f: &LatticeVector) -> LatticeVector {
    f.transformed(zeta_supersets_in_place)
}

pub fn mobius_subsets(g: &LatticeVector) -> LatticeVector {
    g.transformed(mobius_subsets_in_place)
}

pub fn mobius_supersets(g: &LatticeVector) -> LatticeVector {
    g.transformed(mobius_supersets_in_place)
}
