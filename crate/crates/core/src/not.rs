//! CUSUM contrast and Narrowest-Over-Threshold (NOT) change-point detection
//! for piecewise-constant signals.
//!
//! Indices are 1-based and intervals inclusive, matching the way timescales
//! are numbered: a change-point `b` separates `v_b` from `v_{b+1}`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{AmarError, Result};
use crate::simulate::rng_from_seed;

/// Orders above this use randomly drawn intervals by default.
pub const ALL_PAIRS_MAX_ORDER: usize = 500;
/// Number of random intervals drawn for large orders.
pub const DEFAULT_RANDOM_INTERVALS: usize = 10_000;

/// Closed interval `[s, e]` with `1 ≤ s < e`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Interval {
    s: usize,
    e: usize,
}

impl Interval {
    pub fn new(s: usize, e: usize) -> Result<Self> {
        if s < 1 || s >= e {
            return Err(AmarError::Precondition(format!(
                "interval [{s}, {e}] must satisfy 1 <= s < e"
            )));
        }
        Ok(Self { s, e })
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn e(&self) -> usize {
        self.e
    }

    pub fn width(&self) -> usize {
        self.e - self.s + 1
    }

    pub fn contains(&self, other: &Interval) -> bool {
        self.s <= other.s && other.e <= self.e
    }
}

/// Maximum CUSUM contrast over one interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContrastResult {
    pub interval: Interval,
    pub argmax_b: usize,
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum IntervalMode {
    AllPairs,
    Random { m: usize, seed: u64 },
}

impl IntervalMode {
    /// All pairs up to order 500, otherwise 10 000 random intervals.
    pub fn auto(p: usize, seed: u64) -> Self {
        if p <= ALL_PAIRS_MAX_ORDER {
            IntervalMode::AllPairs
        } else {
            IntervalMode::Random {
                m: DEFAULT_RANDOM_INTERVALS,
                seed,
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntervalSet {
    pub intervals: Vec<Interval>,
    pub mode: IntervalMode,
    pub p: usize,
}

/// Builds the interval family over `[1, p]`.
///
/// Random mode draws both endpoints uniformly with replacement and redraws
/// the pair whenever they coincide, so exactly `m` proper intervals result.
pub fn generate_intervals(p: usize, mode: IntervalMode) -> Result<IntervalSet> {
    if p < 2 {
        return Err(AmarError::Precondition(format!(
            "interval generation needs p >= 2, got {p}"
        )));
    }
    let intervals = match mode {
        IntervalMode::AllPairs => {
            let mut out = Vec::with_capacity(p * (p - 1) / 2);
            for s in 1..p {
                for e in s + 1..=p {
                    out.push(Interval { s, e });
                }
            }
            out
        }
        IntervalMode::Random { m, seed } => {
            if m == 0 {
                return Err(AmarError::Precondition(
                    "random interval mode needs m >= 1".into(),
                ));
            }
            let mut rng = rng_from_seed(seed);
            let mut out = Vec::with_capacity(m);
            while out.len() < m {
                let a = rng.random_range(1..=p);
                let b = rng.random_range(1..=p);
                if a != b {
                    out.push(Interval {
                        s: a.min(b),
                        e: a.max(b),
                    });
                }
            }
            out
        }
    };
    Ok(IntervalSet { intervals, mode, p })
}

/// Prefix sums of a signal, `sums[k] = v_1 + … + v_k`.
#[derive(Debug, Clone)]
struct PrefixSums {
    sums: Vec<f64>,
}

impl PrefixSums {
    fn new(v: &[f64]) -> Self {
        let mut sums = Vec::with_capacity(v.len() + 1);
        sums.push(0.0);
        let mut acc = 0.0;
        for x in v {
            acc += x;
            sums.push(acc);
        }
        Self { sums }
    }

    fn len(&self) -> usize {
        self.sums.len() - 1
    }

    fn sum(&self, from: usize, to: usize) -> f64 {
        self.sums[to] - self.sums[from - 1]
    }

    fn contrast(&self, s: usize, e: usize, b: usize) -> f64 {
        let n_left = (b - s + 1) as f64;
        let n_right = (e - b) as f64;
        let n = (e - s + 1) as f64;
        let left = self.sum(s, b) / n_left;
        let right = self.sum(b + 1, e) / n_right;
        (n_left * n_right / n).sqrt() * (left - right).abs()
    }

    fn scan(&self, iv: Interval) -> ContrastResult {
        let mut best = ContrastResult {
            interval: iv,
            argmax_b: iv.s,
            value: self.contrast(iv.s, iv.e, iv.s),
        };
        for b in iv.s + 1..iv.e {
            let c = self.contrast(iv.s, iv.e, b);
            if c > best.value {
                best.value = c;
                best.argmax_b = b;
            }
        }
        best
    }
}

fn check_interval(len: usize, iv: &Interval) -> Result<()> {
    if iv.e > len {
        return Err(AmarError::Precondition(format!(
            "interval [{}, {}] exceeds signal length {len}",
            iv.s, iv.e
        )));
    }
    Ok(())
}

/// CUSUM contrast of `v` on `[s, e]` at split `b`:
///
/// ```text
/// | √((e−b)/((e−s+1)(b−s+1))) Σ_{s..=b} v − √((b−s+1)/((e−s+1)(e−b))) Σ_{b+1..=e} v |
/// ```
///
/// evaluated in the equivalent form `√(n_l n_r / n) · |mean_l − mean_r|`.
pub fn contrast_cusum(v: &[f64], s: usize, e: usize, b: usize) -> Result<f64> {
    if !(1 <= s && s <= b && b < e && e <= v.len()) {
        return Err(AmarError::Precondition(format!(
            "contrast needs 1 <= s <= b < e <= len, got s={s}, b={b}, e={e}, len={}",
            v.len()
        )));
    }
    let n_left = (b - s + 1) as f64;
    let n_right = (e - b) as f64;
    let n = (e - s + 1) as f64;
    let left = v[s - 1..b].iter().sum::<f64>() / n_left;
    let right = v[b..e].iter().sum::<f64>() / n_right;
    Ok((n_left * n_right / n).sqrt() * (left - right).abs())
}

/// Maximises the contrast over `b ∈ {s, …, e−1}`; ties go to the smallest `b`.
pub fn scan_interval(v: &[f64], iv: Interval) -> Result<ContrastResult> {
    check_interval(v.len(), &iv)?;
    Ok(PrefixSums::new(v).scan(iv))
}

/// Result of one NOT run, including the intervals chosen at each step.
#[derive(Debug, Clone, PartialEq)]
pub struct NotTrace {
    pub change_points: Vec<usize>,
    /// Selected narrowest intervals in the order they were picked.
    pub selected: Vec<ContrastResult>,
}

/// NOT detector with every interval scanned once up front, so repeated runs
/// at different thresholds cost only the recursion.
#[derive(Debug, Clone)]
pub struct NotDetector {
    len: usize,
    /// Scans sorted by (width, s, e).
    scans: Vec<ContrastResult>,
}

impl NotDetector {
    pub fn new(v: &[f64], intervals: &IntervalSet) -> Result<Self> {
        if v.len() < 2 {
            return Err(AmarError::Precondition(
                "NOT needs a signal of length >= 2".into(),
            ));
        }
        let prefix = PrefixSums::new(v);
        let mut scans = Vec::with_capacity(intervals.intervals.len());
        for iv in &intervals.intervals {
            check_interval(prefix.len(), iv)?;
            scans.push(prefix.scan(*iv));
        }
        scans.sort_by_key(|c| (c.interval.width(), c.interval.s, c.interval.e));
        scans.dedup_by_key(|c| c.interval);
        Ok(Self {
            len: v.len(),
            scans,
        })
    }

    /// Largest contrast over all intervals; any threshold at or above it
    /// detects nothing.
    pub fn max_contrast(&self) -> f64 {
        self.scans.iter().fold(0.0, |m, c| m.max(c.value))
    }

    pub fn scans(&self) -> &[ContrastResult] {
        &self.scans
    }

    pub fn detect(&self, zeta: f64) -> Vec<usize> {
        self.detect_traced(zeta).change_points
    }

    pub fn detect_traced(&self, zeta: f64) -> NotTrace {
        let mut selected = Vec::new();
        let mut stack = vec![(1usize, self.len)];
        while let Some((s, e)) = stack.pop() {
            if e <= s {
                continue;
            }
            let bounds = Interval { s, e };
            // First hit in (width, s, e) order is the narrowest with the
            // lexicographic tie-break.
            let hit = self
                .scans
                .iter()
                .find(|c| c.value > zeta && bounds.contains(&c.interval));
            if let Some(best) = hit {
                selected.push(*best);
                let b = best.argmax_b;
                stack.push((b + 1, e));
                stack.push((s, b));
            }
        }
        let mut change_points: Vec<usize> = selected.iter().map(|c| c.argmax_b).collect();
        change_points.sort_unstable();
        NotTrace {
            change_points,
            selected,
        }
    }
}

/// Narrowest-Over-Threshold detection on `v`; returns sorted change-points.
pub fn not_detect(v: &[f64], intervals: &IntervalSet, zeta: f64) -> Result<Vec<usize>> {
    if zeta.is_nan() || zeta <= 0.0 {
        return Err(AmarError::Precondition(format!(
            "threshold must be positive, got {zeta}"
        )));
    }
    Ok(NotDetector::new(v, intervals)?.detect(zeta))
}

/// One independent NOT run per threshold of a strictly descending grid.
pub fn solution_path(
    v: &[f64],
    intervals: &IntervalSet,
    zeta_grid: &[f64],
) -> Result<Vec<(f64, Vec<usize>)>> {
    if zeta_grid.is_empty() {
        return Err(AmarError::Precondition("threshold grid is empty".into()));
    }
    if zeta_grid.windows(2).any(|w| w[0] <= w[1]) {
        return Err(AmarError::Precondition(
            "threshold grid must be strictly descending".into(),
        ));
    }
    if zeta_grid.iter().any(|z| z.is_nan() || *z <= 0.0) {
        return Err(AmarError::Precondition(
            "thresholds must be positive".into(),
        ));
    }
    let detector = NotDetector::new(v, intervals)?;
    Ok(zeta_grid.iter().map(|&z| (z, detector.detect(z))).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all(p: usize) -> IntervalSet {
        generate_intervals(p, IntervalMode::AllPairs).unwrap()
    }

    /// Direct transcription of the two-sum form, independent of the mean form.
    fn contrast_oracle(v: &[f64], s: usize, e: usize, b: usize) -> f64 {
        let (s_, e_, b_) = (s as f64, e as f64, b as f64);
        let left: f64 = (s..=b).map(|t| v[t - 1]).sum();
        let right: f64 = (b + 1..=e).map(|t| v[t - 1]).sum();
        ((e_ - b_) / ((e_ - s_ + 1.0) * (b_ - s_ + 1.0))).sqrt() * left
            - ((b_ - s_ + 1.0) / ((e_ - s_ + 1.0) * (e_ - b_))).sqrt() * right
    }

    #[test]
    fn contrast_examples() {
        let v = [0.0, 0.0, 1.0, 1.0];
        assert!((contrast_cusum(&v, 1, 4, 2).unwrap() - 1.0).abs() < 1e-15);
        let c = [2.5; 9];
        for s in 1..9 {
            for e in s + 1..=9 {
                for b in s..e {
                    assert_eq!(contrast_cusum(&c, s, e, b).unwrap(), 0.0);
                }
            }
        }
        assert!(contrast_cusum(&v, 0, 4, 2).is_err());
        assert!(contrast_cusum(&v, 1, 4, 4).is_err());
        assert!(contrast_cusum(&v, 1, 5, 2).is_err());
        assert!(contrast_cusum(&v, 3, 4, 2).is_err());
    }

    #[test]
    fn contrast_matches_two_sum_form() {
        let v = [0.3, -1.2, 0.7, 2.2, 0.1, -0.4, 1.9];
        for s in 1..7 {
            for e in s + 1..=7 {
                for b in s..e {
                    let got = contrast_cusum(&v, s, e, b).unwrap();
                    assert!((got - contrast_oracle(&v, s, e, b).abs()).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn step_argmax_is_true_location() {
        for loc in 1..10 {
            let v: Vec<f64> = (1..=10)
                .map(|t| if t <= loc { 1.5 } else { -0.5 })
                .collect();
            let iv = Interval::new(1, 10).unwrap();
            // brute force argmax
            let brute = (1..10)
                .max_by(|a, b| {
                    contrast_oracle(&v, 1, 10, *a)
                        .abs()
                        .total_cmp(&contrast_oracle(&v, 1, 10, *b).abs())
                })
                .unwrap();
            assert_eq!(brute, loc);
            assert_eq!(scan_interval(&v, iv).unwrap().argmax_b, loc);
        }
    }

    #[test]
    fn scan_examples() {
        let c = [1.0; 6];
        let r = scan_interval(&c, Interval::new(2, 6).unwrap()).unwrap();
        assert_eq!((r.argmax_b, r.value), (2, 0.0));

        let m1 = [0.5, 0.2, 0.2];
        assert_eq!(
            scan_interval(&m1, Interval::new(1, 3).unwrap())
                .unwrap()
                .argmax_b,
            1
        );

        let mut m3 = vec![0.4];
        m3.extend([-0.1; 4]);
        m3.extend([0.1; 9]);
        assert_eq!(m3.len(), 14);
        assert_eq!(
            scan_interval(&m3, Interval::new(2, 14).unwrap())
                .unwrap()
                .argmax_b,
            5
        );
        assert!(scan_interval(&m3, Interval::new(2, 15).unwrap()).is_err());
    }

    #[test]
    fn interval_generation() {
        assert_eq!(all(4).intervals.len(), 6);
        assert_eq!(all(500).intervals.len(), 124_750);
        let r = generate_intervals(600, IntervalMode::Random { m: 10_000, seed: 3 }).unwrap();
        assert_eq!(r.intervals.len(), 10_000);
        assert!(r
            .intervals
            .iter()
            .all(|iv| iv.s >= 1 && iv.e <= 600 && iv.s < iv.e));
        let again = generate_intervals(600, IntervalMode::Random { m: 10_000, seed: 3 }).unwrap();
        assert_eq!(r, again);
        assert!(generate_intervals(1, IntervalMode::AllPairs).is_err());
        assert!(generate_intervals(5, IntervalMode::Random { m: 0, seed: 1 }).is_err());
        assert_eq!(IntervalMode::auto(500, 1), IntervalMode::AllPairs);
        assert_eq!(
            IntervalMode::auto(501, 1),
            IntervalMode::Random { m: 10_000, seed: 1 }
        );
    }

    #[test]
    fn not_examples() {
        assert!(not_detect(&[0.7; 8], &all(8), 1e-6).unwrap().is_empty());

        let m2 = [0.75, 0.75, -0.2, -0.2, -0.2, 0.0, 0.0];
        assert_eq!(not_detect(&m2, &all(7), 0.01).unwrap(), vec![2, 5]);
        assert_eq!(not_detect(&m2[..5], &all(5), 0.01).unwrap(), vec![2]);

        let m1 = [0.5, 0.2, 0.2, 0.0, 0.0, 0.0];
        assert_eq!(not_detect(&m1, &all(6), 0.01).unwrap(), vec![1, 3]);
        assert!(not_detect(&m1, &all(6), 0.0).is_err());
    }

    #[test]
    fn solution_path_examples() {
        let m1 = [0.5, 0.2, 0.2, 0.0, 0.0, 0.0];
        let path = solution_path(&m1, &all(6), &[10.0, 0.01]).unwrap();
        assert_eq!(path, vec![(10.0, vec![]), (0.01, vec![1, 3])]);
        let single = solution_path(&m1, &all(6), &[0.01]).unwrap();
        assert_eq!(single[0].1, not_detect(&m1, &all(6), 0.01).unwrap());
        let flat = solution_path(&[1.0; 5], &all(5), &[1.0, 0.1, 0.01]).unwrap();
        assert!(flat.iter().all(|(_, cps)| cps.is_empty()));
        assert!(solution_path(&m1, &all(6), &[]).is_err());
        assert!(solution_path(&m1, &all(6), &[0.1, 0.2]).is_err());
    }

    #[test]
    fn threshold_above_max_contrast_detects_nothing() {
        let v = [0.3, 0.1, -0.4, 0.8, 0.8, 0.2];
        let det = NotDetector::new(&v, &all(6)).unwrap();
        assert!(det.detect(det.max_contrast()).is_empty());
        assert!(!det.detect(det.max_contrast() * 0.999).is_empty());
    }

    #[test]
    fn selected_intervals_isolate_one_change() {
        let v = [1.0, 1.0, 1.0, -1.0, -1.0, 0.5, 0.5, 0.5, 0.5, 2.0, 2.0];
        let truth = [3, 5, 9];
        let trace = NotDetector::new(&v, &all(v.len()))
            .unwrap()
            .detect_traced(0.01);
        assert_eq!(trace.change_points, truth);
        for sel in &trace.selected {
            let inside = truth
                .iter()
                .filter(|&&t| sel.interval.s <= t && t < sel.interval.e)
                .count();
            assert_eq!(inside, 1, "{sel:?}");
        }
    }
}
