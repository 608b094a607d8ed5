//! Halton sequences and their p-adically shifted versions.
//!
//! The n-th Halton point in bases `p = (p_1, ..., p_s)` is
//! `x_n = (phi_{p_1}(n), ..., phi_{p_s}(n))`. These are open-type node sets:
//! the first M points of a block of N >= M points are exactly the M-point
//! block, so extending a computation never discards evaluations.
//!
//! Points are generated as exact rationals `num / p^K` per coordinate via an
//! add-one-with-carry digit counter (amortized O(1) carries per point) and
//! converted to `f64` once. A shift, when present, is added to the counter
//! digits in Z_p before the conversion, so shifted coordinates carry the true
//! p-adic structure rather than a float round-trip.

use crate::error::{QmcError, Result};
use crate::padic::{
    digit_length, digits_to_unit, monna_map, radical_inverse_fraction, ratio_to_unit, PAdicNumber,
    Shift, UnitPoint,
};
use crate::primes::validate_bases;

/// Soft cap on materialized blocks (streaming has no limit).
const MAX_BLOCK_BYTES: u128 = 1 << 31;

/// Description of a (possibly shifted) Halton sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct HaltonSpec {
    bases: Vec<u32>,
    start_index: u64,
    shift: Option<Shift>,
}

impl HaltonSpec {
    pub fn new(bases: Vec<u32>) -> Result<Self> {
        validate_bases(&bases)?;
        Ok(Self { bases, start_index: 0, shift: None })
    }

    /// First `s` primes as bases.
    pub fn first_primes(s: usize) -> Result<Self> {
        Self::new(crate::primes::first_primes(s))
    }

    pub fn with_start(mut self, start_index: u64) -> Self {
        self.start_index = start_index;
        self
    }

    pub fn with_shift(mut self, shift: Shift) -> Result<Self> {
        if shift.bases() != self.bases {
            return Err(QmcError::IncompatibleOperands(format!(
                "shift bases {:?} do not match sequence bases {:?}",
                shift.bases(),
                self.bases
            )));
        }
        self.shift = Some(shift);
        Ok(self)
    }

    pub fn without_shift(mut self) -> Self {
        self.shift = None;
        self
    }

    pub fn bases(&self) -> &[u32] {
        &self.bases
    }

    pub fn dim(&self) -> usize {
        self.bases.len()
    }

    pub fn start_index(&self) -> u64 {
        self.start_index
    }

    pub fn shift(&self) -> Option<&Shift> {
        self.shift.as_ref()
    }
}

/// A finite set of points in `[0, 1)^s`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    bases: Vec<u32>,
    data: Vec<f64>,
}

impl PointSet {
    /// Wraps raw coordinates (length must be a multiple of the dimension).
    pub fn from_coords(bases: Vec<u32>, data: Vec<f64>) -> Result<Self> {
        validate_bases(&bases)?;
        if data.len() % bases.len() != 0 {
            return Err(QmcError::DimensionMismatch {
                expected: bases.len(),
                got: data.len() % bases.len(),
            });
        }
        if let Some(&bad) = data.iter().find(|c| !(0.0..1.0).contains(*c)) {
            return Err(QmcError::Domain(format!("coordinate {bad} outside [0, 1)")));
        }
        Ok(Self { bases, data })
    }

    pub(crate) fn new_unchecked(bases: Vec<u32>, data: Vec<f64>) -> Self {
        Self { bases, data }
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.bases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.bases.len()
    }

    pub fn bases(&self) -> &[u32] {
        &self.bases
    }

    pub fn point(&self, i: usize) -> &[f64] {
        let s = self.dim();
        &self.data[i * s..(i + 1) * s]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.dim())
    }

    /// The first `n` points (open-type prefix).
    pub fn prefix(&self, n: usize) -> PointSet {
        assert!(n <= self.len());
        PointSet { bases: self.bases.clone(), data: self.data[..n * self.dim()].to_vec() }
    }

    /// CSV export: header `x1,...,xs`, one row per point, 17 significant
    /// digits, `\n` line endings.
    pub fn write_csv<W: std::io::Write>(&self, w: &mut W) -> std::io::Result<()> {
        let header: Vec<String> = (1..=self.dim()).map(|j| format!("x{j}")).collect();
        writeln!(w, "{}", header.join(","))?;
        for row in self.rows() {
            let cells: Vec<String> = row.iter().map(|&x| crate::fmt::sig17(x)).collect();
            writeln!(w, "{}", cells.join(","))?;
        }
        Ok(())
    }
}

/// Per-coordinate incremental radical-inverse state.
struct CoordState {
    p: u64,
    /// base-p digits of the current index, least significant first
    digits: Vec<u32>,
    /// numerator of the radical inverse over `den`
    num: u64,
    /// p^(digit count)
    den: u64,
    /// p^0 .. p^(digit count - 1)
    pows: Vec<u64>,
    sigma: Option<PAdicNumber>,
    scratch: Vec<u32>,
}

impl CoordState {
    fn new(p: u32, start: u64, sigma: Option<PAdicNumber>) -> Self {
        let k = digit_length(p, start).max(1) as usize;
        let mut digits = vec![0u32; k];
        let mut n = start;
        for d in digits.iter_mut() {
            *d = (n % p as u64) as u32;
            n /= p as u64;
        }
        let mut pows = Vec::with_capacity(k);
        let mut pw = 1u64;
        for _ in 0..k {
            pows.push(pw);
            pw *= p as u64;
        }
        let num = digits.iter().enumerate().map(|(i, &d)| d as u64 * pows[k - 1 - i]).sum();
        let precision = sigma.as_ref().map_or(0, |z| z.precision());
        Self { p: p as u64, digits, num, den: pw, pows, sigma, scratch: vec![0; precision] }
    }

    /// Advance the digit counter by one.
    fn increment(&mut self) {
        let p = self.p as u32;
        let mut i = 0;
        loop {
            if i == self.digits.len() {
                // all digits rolled over; widen by one digit (num is 0 here)
                debug_assert_eq!(self.num, 0);
                self.digits.push(0);
                self.pows.push(self.den);
                self.den *= self.p;
            }
            let k = self.digits.len();
            if self.digits[i] + 1 < p {
                self.digits[i] += 1;
                self.num += self.pows[k - 1 - i];
                return;
            }
            self.digits[i] = 0;
            self.num -= (p - 1) as u64 * self.pows[k - 1 - i];
            i += 1;
        }
    }

    /// Current coordinate value in `[0, 1)`.
    fn value(&mut self) -> f64 {
        match &self.sigma {
            None => ratio_to_unit(self.num as u128, self.den as u128),
            Some(sigma) => {
                // carry addition of the index digits and the shift digits
                let p = self.p as u32;
                let sd = sigma.digits();
                let mut carry = 0u32;
                for r in 0..sd.len() {
                    let nd = self.digits.get(r).copied().unwrap_or(0);
                    let mut d = nd + sd[r] + carry;
                    carry = if d >= p { 1 } else { 0 };
                    if d >= p {
                        d -= p;
                    }
                    self.scratch[r] = d;
                }
                digits_to_unit(p, &self.scratch)
            }
        }
    }
}

/// Streaming generator over n = start_index, start_index + 1, ...
///
/// The stream is infinite; `Iterator::next` never returns `None`.
pub struct HaltonStream {
    bases: Vec<u32>,
    states: Vec<CoordState>,
    index: u64,
}

impl HaltonStream {
    pub fn new(spec: &HaltonSpec) -> Self {
        let states = spec
            .bases
            .iter()
            .enumerate()
            .map(|(j, &p)| {
                let sigma = spec.shift.as_ref().map(|sh| sh.sigma()[j].clone());
                CoordState::new(p, spec.start_index, sigma)
            })
            .collect();
        Self { bases: spec.bases.clone(), states, index: spec.start_index }
    }

    /// Index of the point the next call will produce.
    pub fn peek_index(&self) -> u64 {
        self.index
    }

    /// Writes the next point into `out` and returns its sequence index.
    pub fn next_into(&mut self, out: &mut [f64]) -> u64 {
        assert_eq!(out.len(), self.states.len());
        for (slot, state) in out.iter_mut().zip(&mut self.states) {
            *slot = state.value();
        }
        let n = self.index;
        for state in &mut self.states {
            state.increment();
        }
        self.index += 1;
        n
    }
}

impl Iterator for HaltonStream {
    type Item = UnitPoint;

    fn next(&mut self) -> Option<UnitPoint> {
        let mut coords = vec![0.0; self.states.len()];
        self.next_into(&mut coords);
        Some(UnitPoint::new_unchecked(coords, self.bases.clone()))
    }
}

/// The n-th point of the sequence (direct evaluation, no streaming state).
pub fn halton_point(spec: &HaltonSpec, n: u64) -> UnitPoint {
    let coords = spec
        .bases
        .iter()
        .enumerate()
        .map(|(j, &p)| match spec.shift.as_ref() {
            None => {
                let (num, den) = radical_inverse_fraction(p, n);
                ratio_to_unit(num, den)
            }
            Some(shift) => {
                let sigma = &shift.sigma()[j];
                let z = PAdicNumber::from_integer(p, n, sigma.precision())
                    .expect("validated base")
                    .add(sigma)
                    .expect("compatible by construction");
                monna_map(&z)
            }
        })
        .collect();
    UnitPoint::new_unchecked(coords, spec.bases.to_vec())
}

/// The first `count` points from `spec.start_index` as a materialized block.
pub fn halton_block(spec: &HaltonSpec, count: usize) -> Result<PointSet> {
    if count == 0 {
        return Err(QmcError::Domain("block needs at least one point".into()));
    }
    let bytes = count as u128 * spec.dim() as u128 * 8;
    if bytes > MAX_BLOCK_BYTES {
        return Err(QmcError::ResourceLimit(format!(
            "block of {count} points in dimension {} exceeds the in-memory budget; use HaltonStream",
            spec.dim()
        )));
    }
    let mut stream = HaltonStream::new(spec);
    let s = spec.dim();
    let mut data = vec![0.0; count * s];
    for row in data.chunks_exact_mut(s) {
        stream.next_into(row);
    }
    Ok(PointSet::new_unchecked(spec.bases.clone(), data))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::{monna_inverse, sample_shift};

    #[test]
    fn first_points_in_bases_2_3() {
        let spec = HaltonSpec::new(vec![2, 3]).unwrap();
        assert_eq!(halton_point(&spec, 0).coords(), &[0.0, 0.0]);
        let p5 = halton_point(&spec, 5);
        assert_eq!(p5.coords()[0], 0.625);
        assert_eq!(p5.coords()[1], 7.0 / 9.0);
    }

    #[test]
    fn shifted_point_example() {
        let sigma = Shift::explicit(vec![monna_inverse(0.5, 2, 64).unwrap()]).unwrap();
        let spec = HaltonSpec::new(vec![2]).unwrap().with_shift(sigma).unwrap();
        assert_eq!(halton_point(&spec, 1).coords(), &[0.25]);
    }

    #[test]
    fn block_of_four_base_two() {
        let spec = HaltonSpec::new(vec![2]).unwrap();
        let block = halton_block(&spec, 4).unwrap();
        let xs: Vec<f64> = block.rows().map(|r| r[0]).collect();
        assert_eq!(xs, vec![0.0, 0.5, 0.25, 0.75]);
    }

    #[test]
    fn prefix_consistency() {
        let spec = HaltonSpec::new(vec![2, 3, 5]).unwrap();
        let big = halton_block(&spec, 64).unwrap();
        for m in [1usize, 7, 32, 63] {
            let small = halton_block(&spec, m).unwrap();
            assert_eq!(big.prefix(m), small);
        }
    }

    #[test]
    fn incremental_matches_direct_evaluation() {
        // every index below 2^20 for bases 2 and 3; sampled for the rest
        for &p in &[2u32, 3] {
            let spec = HaltonSpec::new(vec![p]).unwrap();
            let mut stream = HaltonStream::new(&spec);
            let mut buf = [0.0];
            for n in 0..(1u64 << 20) {
                stream.next_into(&mut buf);
                assert_eq!(buf[0], halton_point(&spec, n).coords()[0], "p={p} n={n}");
            }
        }
        for &p in &[5u32, 7, 11] {
            let spec = HaltonSpec::new(vec![p]).unwrap();
            let mut stream = HaltonStream::new(&spec);
            let mut buf = [0.0];
            for n in 0..8192u64 {
                stream.next_into(&mut buf);
                assert_eq!(buf[0], halton_point(&spec, n).coords()[0], "p={p} n={n}");
            }
        }
        // spot checks deeper into the sequence
        let spec = HaltonSpec::new(vec![3]).unwrap().with_start((1 << 20) - 5);
        let mut stream = HaltonStream::new(&spec);
        let mut buf = [0.0];
        for n in ((1u64 << 20) - 5)..((1 << 20) + 5) {
            stream.next_into(&mut buf);
            assert_eq!(buf[0], halton_point(&spec, n).coords()[0], "n={n}");
        }
    }

    #[test]
    fn values_match_exact_rationals() {
        // num/den evaluated in exact integer arithmetic, one rounding at the end
        let spec = HaltonSpec::new(vec![7]).unwrap();
        for n in [1u64, 48, 342, 2400, 1 << 19] {
            let x = halton_point(&spec, n).coords()[0];
            let (num, den) = radical_inverse_fraction(7, n);
            let exact = num as f64 / den as f64;
            assert!((x - exact).abs() <= exact.abs() * 2f64.powi(-52), "n={n}");
        }
    }

    #[test]
    fn shifted_stream_matches_shifted_point() {
        let shift = sample_shift(&[2, 3], 64, 11, 3).unwrap();
        let spec = HaltonSpec::new(vec![2, 3]).unwrap().with_shift(shift).unwrap();
        let block = halton_block(&spec, 50).unwrap();
        for n in 0..50u64 {
            assert_eq!(block.point(n as usize), halton_point(&spec, n).coords(), "n={n}");
        }
    }

    #[test]
    fn start_index_offsets_the_sequence() {
        let spec = HaltonSpec::new(vec![2, 3]).unwrap();
        let offset = spec.clone().with_start(10);
        let a = halton_block(&offset, 5).unwrap();
        for i in 0..5u64 {
            assert_eq!(a.point(i as usize), halton_point(&spec, 10 + i).coords());
        }
    }

    #[test]
    fn block_budget_is_enforced() {
        let spec = HaltonSpec::new(vec![2]).unwrap();
        assert!(matches!(halton_block(&spec, 1 << 60), Err(QmcError::ResourceLimit(_))));
        assert!(halton_block(&spec, 0).is_err());
    }

    #[test]
    fn csv_export_has_header_and_17_digits() {
        let spec = HaltonSpec::new(vec![2, 3]).unwrap();
        let block = halton_block(&spec, 2).unwrap();
        let mut buf = Vec::new();
        block.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "x1,x2");
        assert!(lines[2].starts_with("5.0000000000000000e-1,"));
    }
}
