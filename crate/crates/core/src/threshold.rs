//! Monte Carlo calibration of the detection threshold.
//!
//! The threshold `q(alpha)` is the upper-alpha quantile of
//!
//! ```text
//! D = sup_{0 <= u < v <= 1} (B(v) - B(u)) / (v - u)^beta
//! ```
//!
//! for a standard Brownian motion `B`. Each draw simulates `B` on the grid
//! `k / G` and scans every grid pair. Scanning lag by lag lets the scan stop
//! once `(G / k)^beta * U` falls below the running maximum, where `U` is the
//! largest unweighted increment; the result is identical to a full scan.
//!
//! The integrand is oriented as `B(v) - B(u)` with `u < v`, so that the
//! denominator is a power of a positive number.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::detector::check_beta;
use crate::error::{Error, Result};
use crate::fmt::sig;
use crate::rng::stream;

pub const DEFAULT_GRID: usize = 2000;
pub const DEFAULT_REPS: usize = 200_000;
pub const DEFAULT_SEED: u64 = 20_250_101;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdRequest {
    pub alpha: f64,
    pub beta: f64,
    pub grid: usize,
    pub reps: usize,
    pub seed: u64,
}

impl ThresholdRequest {
    /// Request with the default grid, replication count and seed.
    pub fn with_defaults(alpha: f64, beta: f64) -> Self {
        Self {
            alpha,
            beta,
            grid: DEFAULT_GRID,
            reps: DEFAULT_REPS,
            seed: DEFAULT_SEED,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_alpha(self.alpha)?;
        check_beta(self.beta)?;
        if self.grid < 2 {
            return Err(Error::config(format!("grid must be at least 2, got {}", self.grid)));
        }
        if self.reps == 0 {
            return Err(Error::config("reps must be at least 1"));
        }
        let product = self.reps as f64 * self.alpha;
        if product < 10.0 {
            return Err(Error::UnreliableQuantile { product });
        }
        Ok(())
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::config(format!("alpha must lie in (0, 1), got {alpha}")))
    }
}

/// Brownian path on `k / grid`, `k = 0..=grid`, starting at 0.
pub fn simulate_path<R: Rng + ?Sized>(grid: usize, rng: &mut R) -> Vec<f64> {
    let sd = (1.0 / grid as f64).sqrt();
    let mut path = Vec::with_capacity(grid + 1);
    let mut b = 0.0;
    path.push(b);
    for _ in 0..grid {
        let z: f64 = rng.sample(StandardNormal);
        b += sd * z;
        path.push(b);
    }
    path
}

/// `(G / k)^beta` for `k = 0..=G`; index 0 is unused.
fn lag_weights(grid: usize, beta: f64) -> Vec<f64> {
    let g = grid as f64;
    (0..=grid)
        .map(|k| if k == 0 { f64::INFINITY } else { (g / k as f64).powf(beta) })
        .collect()
}

/// `max_{u < v} (path[v] - path[u])`.
fn max_increment(path: &[f64]) -> f64 {
    let mut best = f64::NEG_INFINITY;
    let mut low = path[0];
    for &b in &path[1..] {
        best = best.max(b - low);
        low = low.min(b);
    }
    best
}

/// `max_u (path[u + lag] - path[u])`.
fn max_lag_increment(path: &[f64], lag: usize) -> f64 {
    const LANES: usize = 8;
    let ahead = &path[lag..];
    let behind = &path[..ahead.len()];
    let mut acc = [f64::NEG_INFINITY; LANES];
    let mut a_chunks = ahead.chunks_exact(LANES);
    let mut b_chunks = behind.chunks_exact(LANES);
    for (a, b) in (&mut a_chunks).zip(&mut b_chunks) {
        for i in 0..LANES {
            let d = a[i] - b[i];
            acc[i] = if d > acc[i] { d } else { acc[i] };
        }
    }
    let mut best = acc.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    for (a, b) in a_chunks.remainder().iter().zip(b_chunks.remainder()) {
        best = best.max(a - b);
    }
    best
}

fn sup_with_weights(path: &[f64], beta: f64, weights: &[f64]) -> f64 {
    let unweighted = max_increment(path);
    if beta == 0.0 {
        return unweighted;
    }
    let grid = path.len() - 1;
    let mut best = f64::NEG_INFINITY;
    for (lag, &w) in weights.iter().enumerate().take(grid + 1).skip(1) {
        // every later lag has a smaller weight and an increment <= unweighted
        if unweighted >= 0.0 && unweighted * w <= best {
            break;
        }
        best = best.max(max_lag_increment(path, lag) * w);
    }
    best
}

/// Largest weighted increment `(B(v) - B(u)) / (v - u)^beta` over grid pairs
/// `u < v` of a path sampled on `k / G`, `k = 0..=G`.
pub fn sup_weighted_increment(path: &[f64], beta: f64) -> f64 {
    assert!(path.len() >= 2, "path needs at least two grid points");
    let weights = lag_weights(path.len() - 1, beta);
    sup_with_weights(path, beta, &weights)
}

/// One draw of the discretized supremum.
pub fn simulate_sup_increment<R: Rng + ?Sized>(beta: f64, grid: usize, rng: &mut R) -> f64 {
    let path = simulate_path(grid, rng);
    sup_weighted_increment(&path, beta)
}

/// `reps` independent draws; draw `i` uses the stream derived from `(seed, i)`,
/// so a smaller `reps` yields a prefix of a larger run.
pub fn sample_sup_increments(beta: f64, grid: usize, reps: usize, seed: u64) -> Vec<f64> {
    let weights = lag_weights(grid, beta);
    (0..reps)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream(seed, &[i as u64]);
            let path = simulate_path(grid, &mut rng);
            sup_with_weights(&path, beta, &weights)
        })
        .collect()
}

/// Order statistic at rank `ceil((1 - alpha) * R)` (1-based) of `sorted`.
pub fn upper_quantile(sorted: &[f64], alpha: f64) -> f64 {
    let r = sorted.len();
    assert!(r > 0, "empty sample");
    // ceil((1 - alpha) R) = R - floor(alpha R), evaluated without the
    // rounding error of 1 - alpha.
    let below = (alpha * r as f64 + 1e-9).floor() as usize;
    let rank = r.saturating_sub(below).clamp(1, r);
    sorted[rank - 1]
}

fn sorted_sample(beta: f64, grid: usize, reps: usize, seed: u64) -> Vec<f64> {
    let mut sample = sample_sup_increments(beta, grid, reps, seed);
    sample.sort_by(f64::total_cmp);
    sample
}

pub fn quantile(req: &ThresholdRequest) -> Result<f64> {
    req.validate()?;
    let sample = sorted_sample(req.beta, req.grid, req.reps, req.seed);
    Ok(upper_quantile(&sample, req.alpha))
}

/// Quantiles for several levels from one shared sample.
pub fn quantiles(alphas: &[f64], beta: f64, grid: usize, reps: usize, seed: u64) -> Result<Vec<f64>> {
    for &alpha in alphas {
        ThresholdRequest { alpha, beta, grid, reps, seed }.validate()?;
    }
    if alphas.is_empty() {
        return Ok(Vec::new());
    }
    let sample = sorted_sample(beta, grid, reps, seed);
    Ok(alphas.iter().map(|&a| upper_quantile(&sample, a)).collect())
}

#[derive(Debug, Clone, PartialEq)]
pub enum CacheStatus {
    Hit,
    Miss,
    /// The cache could not be read in full; unreadable lines were dropped.
    Rebuilt(String),
}

type CacheKey = (u64, u64, usize, usize, u64);

fn key(req: &ThresholdRequest) -> CacheKey {
    (req.alpha.to_bits(), req.beta.to_bits(), req.grid, req.reps, req.seed)
}

fn parse_line(line: &str) -> Option<(ThresholdRequest, f64)> {
    let fields: Vec<&str> = line.split(' ').collect();
    if fields.len() != 6 {
        return None;
    }
    let req = ThresholdRequest {
        alpha: fields[0].parse().ok()?,
        beta: fields[1].parse().ok()?,
        grid: fields[2].parse().ok()?,
        reps: fields[3].parse().ok()?,
        seed: fields[4].parse().ok()?,
    };
    let q: f64 = fields[5].parse().ok()?;
    q.is_finite().then_some((req, q))
}

fn format_line(req: &ThresholdRequest, q: f64) -> String {
    format!(
        "{} {} {} {} {} {}",
        sig(req.alpha, 17),
        sig(req.beta, 17),
        req.grid,
        req.reps,
        req.seed,
        sig(q, 17)
    )
}

/// On-disk table of computed thresholds, one `alpha beta grid reps seed q`
/// record per line.
#[derive(Debug, Default)]
pub struct ThresholdCache {
    entries: BTreeMap<CacheKey, (ThresholdRequest, f64)>,
    problem: Option<String>,
}

impl ThresholdCache {
    /// Loads `path`. A missing file is an empty cache; unreadable content is
    /// dropped and remembered as a problem.
    pub fn load(path: &Path) -> Self {
        let mut cache = Self::default();
        let text = match fs::read(path) {
            Ok(bytes) => match String::from_utf8(bytes) {
                Ok(text) => text,
                Err(_) => {
                    cache.problem = Some(format!("{} is not valid UTF-8", path.display()));
                    return cache;
                }
            },
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return cache,
            Err(e) => {
                cache.problem = Some(format!("{}: {e}", path.display()));
                return cache;
            }
        };
        let mut bad = 0;
        for line in text.lines().filter(|l| !l.trim().is_empty()) {
            match parse_line(line) {
                Some((req, q)) => {
                    cache.entries.insert(key(&req), (req, q));
                }
                None => bad += 1,
            }
        }
        if bad > 0 {
            cache.problem = Some(format!("{}: dropped {bad} malformed line(s)", path.display()));
        }
        cache
    }

    pub fn get(&self, req: &ThresholdRequest) -> Option<f64> {
        self.entries.get(&key(req)).map(|(_, q)| *q)
    }

    pub fn insert(&mut self, req: ThresholdRequest, q: f64) {
        self.entries.insert(key(&req), (req, q));
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Writes the table to a temporary sibling and renames it over `path`.
    pub fn save(&self, path: &Path) -> Result<()> {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        }
        let mut body = String::new();
        for (req, q) in self.entries.values() {
            body.push_str(&format_line(req, *q));
            body.push('\n');
        }
        let mut tmp = path.as_os_str().to_owned();
        tmp.push(format!(".tmp{}", std::process::id()));
        let tmp = std::path::PathBuf::from(tmp);
        let mut file = fs::File::create(&tmp).map_err(|e| Error::io(&tmp, e))?;
        file.write_all(body.as_bytes()).map_err(|e| Error::io(&tmp, e))?;
        file.sync_all().map_err(|e| Error::io(&tmp, e))?;
        fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
    }
}

/// Looks `req` up in the cache at `cache_path`, computing and storing it on
/// a miss.
pub fn cached_quantile(req: &ThresholdRequest, cache_path: &Path) -> Result<(f64, CacheStatus)> {
    let (mut values, status) = cached_quantiles(
        &[req.alpha],
        req.beta,
        req.grid,
        req.reps,
        req.seed,
        cache_path,
    )?;
    Ok((values.remove(0), status))
}

/// Cached variant of [`quantiles`]; every missing level is computed from one
/// shared sample.
pub fn cached_quantiles(
    alphas: &[f64],
    beta: f64,
    grid: usize,
    reps: usize,
    seed: u64,
    cache_path: &Path,
) -> Result<(Vec<f64>, CacheStatus)> {
    let requests: Vec<ThresholdRequest> = alphas
        .iter()
        .map(|&alpha| ThresholdRequest { alpha, beta, grid, reps, seed })
        .collect();
    for req in &requests {
        req.validate()?;
    }
    let mut cache = ThresholdCache::load(cache_path);
    let missing: Vec<f64> = requests
        .iter()
        .filter(|r| cache.get(r).is_none())
        .map(|r| r.alpha)
        .collect();
    if missing.is_empty() && cache.problem.is_none() {
        let values = requests.iter().map(|r| cache.get(r).expect("present")).collect();
        return Ok((values, CacheStatus::Hit));
    }
    if !missing.is_empty() {
        let computed = quantiles(&missing, beta, grid, reps, seed)?;
        for (alpha, q) in missing.iter().zip(computed) {
            cache.insert(ThresholdRequest { alpha: *alpha, beta, grid, reps, seed }, q);
        }
    }
    cache.save(cache_path)?;
    let values = requests.iter().map(|r| cache.get(r).expect("inserted")).collect();
    let status = match cache.problem.take() {
        Some(problem) => CacheStatus::Rebuilt(problem),
        None => CacheStatus::Miss,
    };
    Ok((values, status))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_force(path: &[f64], beta: f64) -> f64 {
        let g = (path.len() - 1) as f64;
        let mut best = f64::NEG_INFINITY;
        for u in 0..path.len() {
            for v in u + 1..path.len() {
                let width = (v - u) as f64 / g;
                best = best.max((path[v] - path[u]) / width.powf(beta));
            }
        }
        best
    }

    #[test]
    fn flat_path_is_zero() {
        let flat = vec![0.0; 51];
        for beta in [0.0, 0.25, 0.45] {
            assert_eq!(sup_weighted_increment(&flat, beta), 0.0);
        }
    }

    #[test]
    fn pruned_scan_matches_pair_scan() {
        for seed in 0..200u64 {
            let mut rng = stream(seed, &[99]);
            let grid = 2 + (seed as usize * 7) % 120;
            let path = simulate_path(grid, &mut rng);
            for beta in [0.0, 0.1, 0.25, 0.4, 0.49] {
                let fast = sup_weighted_increment(&path, beta);
                let slow = brute_force(&path, beta);
                assert!((fast - slow).abs() <= 1e-12 * slow.abs().max(1.0), "{seed} {beta}: {fast} vs {slow}");
            }
        }
    }

    #[test]
    fn unweighted_identity() {
        let mut rng = stream(3, &[]);
        for _ in 0..50 {
            let path = simulate_path(300, &mut rng);
            let mut best = f64::NEG_INFINITY;
            for v in 1..path.len() {
                let low = path[..v].iter().copied().fold(f64::INFINITY, f64::min);
                best = best.max(path[v] - low);
            }
            assert_eq!(sup_weighted_increment(&path, 0.0), best);
        }
    }

    #[test]
    fn decreasing_path_is_negative() {
        let path: Vec<f64> = (0..10).map(|k| -(k as f64)).collect();
        assert!(sup_weighted_increment(&path, 0.25) < 0.0);
        assert!((sup_weighted_increment(&path, 0.25) - brute_force(&path, 0.25)).abs() < 1e-12);
    }

    #[test]
    fn order_statistic_rank() {
        let sorted: Vec<f64> = (1..=100).map(f64::from).collect();
        assert_eq!(upper_quantile(&sorted, 0.05), 95.0);
        assert_eq!(upper_quantile(&sorted, 0.01), 99.0);
        assert_eq!(upper_quantile(&sorted, 0.999), 1.0);
        let sorted: Vec<f64> = (1..=200_000).map(f64::from).collect();
        assert_eq!(upper_quantile(&sorted, 0.05), 190_000.0);
        assert_eq!(upper_quantile(&sorted, 0.0125), 197_500.0);
    }

    #[test]
    fn request_validation() {
        let ok = ThresholdRequest { alpha: 0.05, beta: 0.25, grid: 100, reps: 1000, seed: 1 };
        assert!(ok.validate().is_ok());
        assert!(ThresholdRequest { alpha: 0.0, ..ok }.validate().is_err());
        assert!(ThresholdRequest { beta: 0.5, ..ok }.validate().is_err());
        assert!(ThresholdRequest { grid: 1, ..ok }.validate().is_err());
        assert!(matches!(
            ThresholdRequest { reps: 100, ..ok }.validate(),
            Err(Error::UnreliableQuantile { .. })
        ));
    }

    #[test]
    fn monotone_in_alpha_and_beta() {
        let (grid, reps, seed) = (200, 4000, 17);
        let q = quantiles(&[0.01, 0.05, 0.2], 0.25, grid, reps, seed).unwrap();
        assert!(q[0] >= q[1] && q[1] >= q[2]);
        let mut last = f64::NEG_INFINITY;
        for beta in [0.0, 0.1, 0.25, 0.4] {
            let qb = quantile(&ThresholdRequest { alpha: 0.05, beta, grid, reps, seed }).unwrap();
            assert!(qb >= last);
            last = qb;
        }
    }

    #[test]
    fn sample_prefix_property() {
        let long = sample_sup_increments(0.25, 64, 40, 5);
        let short = sample_sup_increments(0.25, 64, 10, 5);
        assert_eq!(&long[..10], &short[..]);
    }

    #[test]
    fn cache_roundtrip_and_corruption() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("q.txt");
        let req = ThresholdRequest { alpha: 0.05, beta: 0.25, grid: 64, reps: 400, seed: 9 };
        let (q1, s1) = cached_quantile(&req, &path).unwrap();
        assert_eq!(s1, CacheStatus::Miss);
        let (q2, s2) = cached_quantile(&req, &path).unwrap();
        assert_eq!((q1, s2), (q2, CacheStatus::Hit));
        assert_eq!(q1, quantile(&req).unwrap());

        let text = fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().count(), 1);
        assert!(text.starts_with("0.050000000000000003 0.25 64 400 9 "), "{text}");

        let (_, s3) = cached_quantile(&ThresholdRequest { seed: 10, ..req }, &path).unwrap();
        assert_eq!(s3, CacheStatus::Miss);
        assert_eq!(ThresholdCache::load(&path).len(), 2);

        fs::write(&path, "garbage here\n\u{0}\n").unwrap();
        let (q4, s4) = cached_quantile(&req, &path).unwrap();
        assert!(matches!(s4, CacheStatus::Rebuilt(_)));
        assert_eq!(q4, q1);
        assert_eq!(cached_quantile(&req, &path).unwrap().1, CacheStatus::Hit);
    }
}
