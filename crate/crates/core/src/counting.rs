//! Exact counting tables for colored weighted rooted trees, forests and free
//! trees.
//!
//! Notation used below, for a color `c`:
//! * `rt≤(w, c, m)`: rooted trees of weight `w`, root colored `c`, every child
//!   subtree of weight at most `m`. `rt(w, c) = rt≤(w, c, w)`.
//! * `f(w, c, m, μ)`: forests of weight `w` whose trees are rooted at color
//!   `c`, with largest tree weight exactly `m` attained exactly `μ` times.
//! * `f≤(w, c, m, μ)`: the same with multiplicity in `1..=μ`.
//! * `f≤(w, c, m)`: forests of weight `w` with every tree weighing at most
//!   `m`; equals 1 at `w = 0` (the empty forest).
//!
//! Every tree rooted at `c` weighs at least `mintw(c)`, which is at least 1.

use std::fmt::Write as _;
use std::io::{BufRead, BufReader, Write as _};
use std::path::Path;

use num_traits::{One, Zero};
use sha2::{Digest, Sha256};

use crate::combinatorics::multiset_count;
use crate::scheme::{ColorId, ColorScheme};
use crate::{Count, Error, Result};

static ZERO: Count = Count::ZERO;

/// One of the disjoint families that partition the free trees of a weight,
/// distinguished by the shape of their set of centroids.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FreeSegment {
    /// A single centroid of the given color.
    Mono(ColorId),
    /// Two adjacent centroids; the first color is the one declared first.
    Bi(ColorId, ColorId),
    /// Three centroids whose middle one weighs 0 and has the given color.
    Tri(ColorId),
}

/// Free-tree counts of one weight, split by [`FreeSegment`] in enumeration
/// order: monocentroidal per root color, then bicentroidal color pairs, then
/// tricentroidal.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FreeCounts {
    pub segments: Vec<(FreeSegment, Count)>,
    pub total: Count,
}

impl FreeCounts {
    pub fn mono(&self, c: ColorId) -> Count {
        self.sum(|s| s == FreeSegment::Mono(c))
    }

    pub fn mono_total(&self) -> Count {
        self.sum(|s| matches!(s, FreeSegment::Mono(_)))
    }

    pub fn bi(&self) -> Count {
        self.sum(|s| matches!(s, FreeSegment::Bi(..)))
    }

    pub fn tri(&self) -> Count {
        self.sum(|s| matches!(s, FreeSegment::Tri(_)))
    }

    fn sum(&self, pred: impl Fn(FreeSegment) -> bool) -> Count {
        self.segments.iter().filter(|(s, _)| pred(*s)).map(|(_, n)| n).sum()
    }
}

/// Memoized counts for one scheme and every weight up to a bound. Immutable
/// after construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountTable {
    scheme: ColorScheme,
    max_weight: u32,
    one: Count,
    // Layouts, per color: rt_le[w][m] and f_le[w][m] for m in 0..=w;
    // f_mu[w][m][μ] and f_mu_le[w][m][μ] for μ in 0..=w/m (index 0 holds 0,
    // m = 0 holds nothing); cc[m][μ] = CC(rt(m, c), μ) for μ in 0..=N/m.
    rt_le: Vec<Vec<Vec<Count>>>,
    f_mu: Vec<Vec<Vec<Vec<Count>>>>,
    f_mu_le: Vec<Vec<Vec<Vec<Count>>>>,
    f_le: Vec<Vec<Vec<Count>>>,
    cc: Vec<Vec<Vec<Count>>>,
    free: Vec<FreeCounts>,
}

/// What [`CountTable::load_or_build`] did.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CacheOutcome {
    Loaded,
    Built,
    /// The cache existed but was unusable; the reason is attached.
    Rebuilt(String),
}

impl CountTable {
    /// Builds all tables for weights `0..=max_weight`.
    pub fn build(scheme: ColorScheme, max_weight: u32) -> Result<Self> {
        if max_weight == 0 {
            return Err(Error::Argument("the maximum weight must be positive".into()));
        }
        let k = scheme.len();
        let mut t = CountTable {
            scheme,
            max_weight,
            one: Count::one(),
            rt_le: vec![Vec::new(); k],
            f_mu: vec![Vec::new(); k],
            f_mu_le: vec![Vec::new(); k],
            f_le: vec![Vec::new(); k],
            cc: vec![Vec::new(); k],
            free: Vec::new(),
        };
        // Colors admitting weight 0 need the child color's forests of the
        // same weight; those children never admit weight 0.
        let (zero, positive): (Vec<ColorId>, Vec<ColorId>) =
            t.scheme.color_ids().partition(|&c| t.scheme.color(c).min_weight == 0);
        for w in 0..=max_weight {
            t.push_weight(w);
            for group in [&positive, &zero] {
                for &c in group {
                    t.fill_rooted(w, c);
                }
                for &c in group {
                    t.fill_forests(w, c);
                }
            }
        }
        t.fill_free();
        Ok(t)
    }

    fn push_weight(&mut self, w: u32) {
        let wi = w as usize;
        for c in 0..self.scheme.len() {
            self.rt_le[c].push(vec![Count::zero(); wi + 1]);
            self.f_le[c].push(vec![Count::zero(); wi + 1]);
            let mu_rows: Vec<Vec<Count>> = (0..=w)
                .map(|m| w.checked_div(m).map_or_else(Vec::new, |q| vec![Count::zero(); q as usize + 1]))
                .collect();
            self.f_mu[c].push(mu_rows.clone());
            self.f_mu_le[c].push(mu_rows);
        }
    }

    fn fill_rooted(&mut self, w: u32, c: ColorId) {
        for m in 0..=w {
            let v = self.eval_rooted_le(w, c, m);
            self.rt_le[c.index()][w as usize][m as usize] = v;
        }
        let row = cc_row(self.rooted(w, c), self.max_weight.checked_div(w));
        self.cc[c.index()].push(row);
    }

    fn fill_forests(&mut self, w: u32, c: ColorId) {
        let (ci, wi) = (c.index(), w as usize);
        for m in 1..=w {
            let mut prefix = Count::zero();
            for mu in 1..=w / m {
                let v = self.eval_forests_exact(w, c, m, mu);
                prefix += &v;
                self.f_mu[ci][wi][m as usize][mu as usize] = v;
                self.f_mu_le[ci][wi][m as usize][mu as usize] = prefix.clone();
            }
        }
        for m in 0..=w {
            let v = self.eval_forests_le(w, c, m);
            self.f_le[ci][wi][m as usize] = v;
        }
    }

    fn fill_free(&mut self) {
        self.free = (0..=self.max_weight).map(|w| self.eval_free(w)).collect();
    }

    // Each eval_* applies one recurrence to entries that are already stored.

    fn eval_rooted_le(&self, w: u32, c: ColorId, m: u32) -> Count {
        let spec = self.scheme.color(c);
        if w < spec.min_tree_weight {
            return Count::zero();
        }
        let child = spec.child;
        (spec.min_weight..=spec.max_weight_within(w))
            .map(|r| self.forests_le(w - r, child, m.min(w - r)))
            .sum()
    }

    fn eval_forests_exact(&self, w: u32, c: ColorId, m: u32, mu: u32) -> Count {
        let rest = w - mu * m;
        self.cc_entry(c, m, mu) * self.forests_le(rest, c, rest.min(m - 1))
    }

    fn eval_forests_le(&self, w: u32, c: ColorId, m: u32) -> Count {
        if w == 0 {
            return Count::one();
        }
        let lo = self.scheme.color(c).min_tree_weight;
        (lo..=m.min(w)).map(|mp| self.forests_le_mu(w, c, mp, w / mp)).sum()
    }

    fn eval_free(&self, w: u32) -> FreeCounts {
        let mut segments = Vec::new();
        if w == 0 {
            return FreeCounts::default();
        }
        let s = &self.scheme;
        let bound = w.div_ceil(2) - 1;
        for &c in s.root_colors() {
            if w >= s.color(c).min_tree_weight {
                segments.push((FreeSegment::Mono(c), self.rooted_le(w, c, bound).clone()));
            }
        }
        if w.is_multiple_of(2) {
            let half = w / 2;
            for c in s.color_ids() {
                let d = s.child(c);
                if s.child(d) != c || d < c || !s.is_root_color(c) || !s.is_root_color(d) {
                    continue;
                }
                let a = self.rooted_le(half, c, half - 1);
                let n = if c == d { multiset_count(a, 2) } else { a * self.rooted_le(half, d, half - 1) };
                segments.push((FreeSegment::Bi(c, d), n));
            }
            for c in s.color_ids() {
                if s.color(c).min_weight == 0 && s.is_root_color(c) {
                    let n = multiset_count(self.rooted(half, s.child(c)), 2);
                    segments.push((FreeSegment::Tri(c), n));
                }
            }
        }
        let total = segments.iter().map(|(_, n)| n).sum();
        FreeCounts { segments, total }
    }

    /// Recomputes every entry from its recurrence and compares.
    pub fn verify(&self) -> Result<()> {
        let bad = |what: String| Err(Error::Cache(format!("entry {what} does not match its recurrence")));
        for w in 0..=self.max_weight {
            for c in self.scheme.color_ids() {
                let name = self.scheme.name(c);
                for m in 0..=w {
                    if self.eval_rooted_le(w, c, m) != *self.rooted_le(w, c, m) {
                        return bad(format!("rt {w} {name} {m}"));
                    }
                    if self.eval_forests_le(w, c, m) != *self.forests_le(w, c, m) {
                        return bad(format!("fle {w} {name} {m}"));
                    }
                }
                for m in 1..=w {
                    let mut prefix = Count::zero();
                    for mu in 1..=w / m {
                        let v = self.forests_exact(w, c, m, mu);
                        if self.eval_forests_exact(w, c, m, mu) != *v {
                            return bad(format!("fmu {w} {name} {m} {mu}"));
                        }
                        prefix += v;
                        if prefix != *self.forests_le_mu(w, c, m, mu) {
                            return bad(format!("fmule {w} {name} {m} {mu}"));
                        }
                    }
                }
            }
            if self.eval_free(w) != self.free[w as usize] {
                return bad(format!("free {w}"));
            }
        }
        Ok(())
    }

    pub fn scheme(&self) -> &ColorScheme {
        &self.scheme
    }

    pub fn max_weight(&self) -> u32 {
        self.max_weight
    }

    pub fn check_weight(&self, w: u32) -> Result<()> {
        if w > self.max_weight {
            Err(Error::TableBounds { weight: w, max: self.max_weight })
        } else {
            Ok(())
        }
    }

    // Unchecked accessors. Bounds `m` larger than `w` are clamped to `w`.

    /// `rt≤(w, c, m)`.
    #[inline]
    pub fn rooted_le(&self, w: u32, c: ColorId, m: u32) -> &Count {
        &self.rt_le[c.index()][w as usize][m.min(w) as usize]
    }

    /// `rt(w, c)`.
    #[inline]
    pub fn rooted(&self, w: u32, c: ColorId) -> &Count {
        self.rooted_le(w, c, w)
    }

    /// `f≤(w, c, m)`.
    #[inline]
    pub fn forests_le(&self, w: u32, c: ColorId, m: u32) -> &Count {
        &self.f_le[c.index()][w as usize][m.min(w) as usize]
    }

    /// `f(w, c, m, μ)`; zero when `μ = 0`, `m = 0` or `μ·m > w`.
    #[inline]
    pub fn forests_exact(&self, w: u32, c: ColorId, m: u32, mu: u32) -> &Count {
        if m == 0 || m > w || mu > w / m {
            return &ZERO;
        }
        &self.f_mu[c.index()][w as usize][m as usize][mu as usize]
    }

    /// `f≤(w, c, m, μ)`; `μ` is clamped to `⌊w/m⌋`.
    #[inline]
    pub fn forests_le_mu(&self, w: u32, c: ColorId, m: u32, mu: u32) -> &Count {
        if m == 0 || m > w {
            return &ZERO;
        }
        &self.f_mu_le[c.index()][w as usize][m as usize][mu.min(w / m) as usize]
    }

    /// Forests of weight exactly `w` with largest tree weight exactly `m`.
    pub fn forests_max(&self, w: u32, c: ColorId, m: u32) -> &Count {
        self.forests_le_mu(w, c, m, u32::MAX)
    }

    /// `CC(rt(m, c), μ)`, the number of multisets of `μ` trees of weight `m`.
    #[inline]
    pub fn cc_entry(&self, c: ColorId, m: u32, mu: u32) -> &Count {
        if mu == 0 {
            return &self.one;
        }
        &self.cc[c.index()][m as usize][mu as usize]
    }

    // Checked accessors.

    pub fn rooted_count(&self, w: u32, c: ColorId) -> Result<Count> {
        self.check_weight(w)?;
        self.check_color(c)?;
        Ok(self.rooted(w, c).clone())
    }

    pub fn rooted_bounded_count(&self, w: u32, c: ColorId, m: u32) -> Result<Count> {
        self.check_weight(w)?;
        self.check_color(c)?;
        Ok(self.rooted_le(w, c, m).clone())
    }

    /// Counts forests of weight `w`. With only `m`, trees weigh at most `m`;
    /// with `m` and `μ`, the largest weight is exactly `m` with multiplicity
    /// exactly `μ`.
    pub fn forest_count(&self, w: u32, c: ColorId, m: Option<u32>, mu: Option<u32>) -> Result<Count> {
        self.check_weight(w)?;
        self.check_color(c)?;
        Ok(match (m, mu) {
            (m, None) => self.forests_le(w, c, m.unwrap_or(w)).clone(),
            (Some(m), Some(mu)) => {
                if w == 0 && mu == 0 {
                    Count::one()
                } else {
                    self.forests_exact(w, c, m, mu).clone()
                }
            }
            (None, Some(_)) => {
                return Err(Error::Argument("a multiplicity requires a largest tree weight".into()))
            }
        })
    }

    pub fn free_count(&self, w: u32) -> Result<&FreeCounts> {
        self.check_weight(w)?;
        Ok(&self.free[w as usize])
    }

    fn check_color(&self, c: ColorId) -> Result<()> {
        if c.index() >= self.scheme.len() {
            return Err(Error::Argument(format!("color #{} is not in the scheme", c.0)));
        }
        Ok(())
    }

    // Cache file: header line, entry lines `kind w c m mu value` with `-`
    // for unused fields, and a trailing `end <sha256 of the preceding lines>`.
    // Only rt, fmu and fle entries are stored; the rest is derived on load.

    pub fn to_cache_string(&self) -> String {
        let mut out = format!("treegen-tables v1 {} {}\n", self.scheme.hash(), self.max_weight);
        for w in 0..=self.max_weight {
            for c in self.scheme.color_ids() {
                let name = self.scheme.name(c);
                for m in 0..=w {
                    writeln!(out, "rt {w} {name} {m} - {}", self.rooted_le(w, c, m)).unwrap();
                }
                for m in 1..=w {
                    for mu in 1..=w / m {
                        writeln!(out, "fmu {w} {name} {m} {mu} {}", self.forests_exact(w, c, m, mu)).unwrap();
                    }
                }
                for m in 0..=w {
                    writeln!(out, "fle {w} {name} {m} - {}", self.forests_le(w, c, m)).unwrap();
                }
            }
        }
        let digest = hex(&Sha256::digest(out.as_bytes()));
        writeln!(out, "end {digest}").unwrap();
        out
    }

    /// Parses a cache produced by [`CountTable::to_cache_string`] for
    /// `scheme`. Any mismatch, gap or checksum failure is a cache error.
    pub fn from_cache_reader(reader: impl BufRead, scheme: &ColorScheme) -> Result<Self> {
        let corrupt = |msg: String| Error::Cache(msg);
        let mut lines = reader.lines();
        let header = lines.next().ok_or_else(|| corrupt("empty cache file".into()))??;
        let fields: Vec<&str> = header.split(' ').collect();
        if fields.len() != 4 || fields[0] != "treegen-tables" || fields[1] != "v1" {
            return Err(corrupt("unrecognized cache header".into()));
        }
        if fields[2] != scheme.hash() {
            return Err(corrupt("cache was built for a different scheme".into()));
        }
        let max_weight: u32 = fields[3].parse().map_err(|_| corrupt("bad maximum weight".into()))?;
        if max_weight == 0 {
            return Err(corrupt("bad maximum weight".into()));
        }
        let mut hasher = Sha256::new();
        hasher.update(header.as_bytes());
        hasher.update(b"\n");

        let k = scheme.len();
        let mut t = CountTable {
            scheme: scheme.clone(),
            max_weight,
            one: Count::one(),
            rt_le: vec![Vec::new(); k],
            f_mu: vec![Vec::new(); k],
            f_mu_le: vec![Vec::new(); k],
            f_le: vec![Vec::new(); k],
            cc: vec![Vec::new(); k],
            free: Vec::new(),
        };
        for w in 0..=max_weight {
            t.push_weight(w);
        }
        let expected_entries: usize = (0..=max_weight as usize)
            .map(|w| 2 * (w + 1) + (1..=w).map(|m| w / m).sum::<usize>())
            .sum::<usize>()
            * k;
        let mut seen = 0usize;
        let mut trailer = None;
        for line in lines {
            let line = line?;
            if let Some(digest) = line.strip_prefix("end ") {
                trailer = Some(digest.to_string());
                break;
            }
            hasher.update(line.as_bytes());
            hasher.update(b"\n");
            let f: Vec<&str> = line.split(' ').collect();
            if f.len() != 6 {
                return Err(corrupt(format!("malformed cache line {line:?}")));
            }
            let num = |s: &str| s.parse::<u32>().map_err(|_| corrupt(format!("malformed cache line {line:?}")));
            let w = num(f[1])?;
            let c = scheme.color_by_name(f[2]).ok_or_else(|| corrupt(format!("unknown color in {line:?}")))?;
            let m = num(f[3])?;
            let value: Count = f[5].parse().map_err(|_| corrupt(format!("bad count in {line:?}")))?;
            if w > max_weight || m > w {
                return Err(corrupt(format!("entry out of range: {line:?}")));
            }
            let (ci, wi, mi) = (c.index(), w as usize, m as usize);
            match f[0] {
                "rt" => t.rt_le[ci][wi][mi] = value,
                "fle" => t.f_le[ci][wi][mi] = value,
                "fmu" => {
                    let mu = num(f[4])?;
                    if m == 0 || mu == 0 || mu > w / m {
                        return Err(corrupt(format!("entry out of range: {line:?}")));
                    }
                    t.f_mu[ci][wi][mi][mu as usize] = value;
                }
                _ => return Err(corrupt(format!("unknown entry kind in {line:?}"))),
            }
            seen += 1;
        }
        let trailer = trailer.ok_or_else(|| corrupt("cache file is truncated".into()))?;
        if seen != expected_entries {
            return Err(corrupt(format!("cache holds {seen} entries, expected {expected_entries}")));
        }
        if trailer != hex(&hasher.finalize()) {
            return Err(corrupt("cache checksum mismatch".into()));
        }
        for c in 0..k {
            for w in 0..=max_weight as usize {
                for m in 1..=w {
                    let mut prefix = Count::zero();
                    for mu in 1..=w / m {
                        prefix += &t.f_mu[c][w][m][mu];
                        t.f_mu_le[c][w][m][mu] = prefix.clone();
                    }
                }
            }
        }
        for c in scheme.color_ids() {
            for w in 0..=max_weight {
                let row = cc_row(t.rooted(w, c), max_weight.checked_div(w));
                t.cc[c.index()].push(row);
            }
        }
        t.fill_free();
        Ok(t)
    }

    pub fn write_cache(&self, path: &Path) -> Result<()> {
        if let Some(dir) = path.parent() {
            if !dir.as_os_str().is_empty() {
                std::fs::create_dir_all(dir)?;
            }
        }
        // Write-then-rename keeps readers from seeing a partial file.
        let tmp = path.with_extension("tmp");
        {
            let mut f = std::io::BufWriter::new(std::fs::File::create(&tmp)?);
            f.write_all(self.to_cache_string().as_bytes())?;
            f.flush()?;
        }
        std::fs::rename(&tmp, path)?;
        Ok(())
    }

    pub fn read_cache(path: &Path, scheme: &ColorScheme) -> Result<Self> {
        let f = std::fs::File::open(path)?;
        Self::from_cache_reader(BufReader::new(f), scheme)
    }

    /// Loads the cache at `path` if it matches `scheme` and covers
    /// `max_weight`; otherwise builds the tables and rewrites the cache.
    pub fn load_or_build(path: &Path, scheme: &ColorScheme, max_weight: u32) -> Result<(Self, CacheOutcome)> {
        let reason = match Self::read_cache(path, scheme) {
            Ok(t) if t.max_weight >= max_weight => return Ok((t, CacheOutcome::Loaded)),
            Ok(t) => Some(format!("cache covers weight {} only", t.max_weight)),
            Err(Error::Io(e)) if e.kind() == std::io::ErrorKind::NotFound => None,
            Err(e) => Some(e.to_string()),
        };
        let t = Self::build(scheme.clone(), max_weight)?;
        t.write_cache(path)?;
        Ok((t, reason.map_or(CacheOutcome::Built, CacheOutcome::Rebuilt)))
    }
}

/// `CC(rt, μ)` for `μ` in `0..=top`; a missing `top` (weight 0) yields `[1]`.
fn cc_row(rt: &Count, top: Option<u32>) -> Vec<Count> {
    let top = top.unwrap_or(0);
    let mut row = Vec::with_capacity(top as usize + 1);
    let mut acc = Count::one();
    row.push(acc.clone());
    for mu in 1..=top {
        // CC(n, μ) = CC(n, μ - 1) · (n + μ - 1) / μ
        acc = acc * (rt + (mu - 1)) / mu;
        row.push(acc.clone());
    }
    row
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}
