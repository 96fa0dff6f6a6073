//! NKq fitness landscapes.
//!
//! Each locus `i` owns a component table of `2^(K+1)` integers in `[0, q-1]`,
//! indexed by its own allele (lowest bit) followed by the alleles of its `K`
//! epistatic links in stored order. Fitness is kept as the exact integer sum
//! of the `N` component values; the normalized value `sum / (N (q-1))` is
//! derived on demand, so neutrality is always an integer comparison.
//!
//! Generation draws from `ChaCha8Rng::seed_from_u64(seed)`: first the links of
//! every locus (ascending), then every table entry (loci ascending, table
//! index ascending, one `gen_range(0..q)` per entry).

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::genotype::Genotype;
use crate::neighborhood::EvalCounter;

/// Largest supported epistasis degree. Tables hold `2^(K+1)` entries per locus.
pub const MAX_K: usize = 24;

/// Version written to and accepted from landscape documents.
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LandscapeError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("genotype has {found} loci but the landscape has {expected}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("line {line}: field `{field}`: {message}")]
    Parse {
        line: usize,
        field: String,
        message: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EpistasisMode {
    /// The `K` loci nearest to `i` on a ring.
    Adjacent,
    /// `K` loci drawn uniformly without replacement.
    Random,
}

impl fmt::Display for EpistasisMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EpistasisMode::Adjacent => "adjacent",
            EpistasisMode::Random => "random",
        })
    }
}

impl FromStr for EpistasisMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "adjacent" => Ok(EpistasisMode::Adjacent),
            "random" => Ok(EpistasisMode::Random),
            other => Err(format!(
                "unknown epistasis mode `{other}` (expected adjacent|random)"
            )),
        }
    }
}

/// Exact fitness: an integer total in `[0, scale]` with `scale = N (q-1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Fitness {
    pub total: u64,
    pub scale: u64,
}

impl Fitness {
    pub fn normalized(&self) -> f64 {
        self.total as f64 / self.scale as f64
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct NkqLandscape {
    n: usize,
    k: usize,
    q: u32,
    mode: EpistasisMode,
    seed: u64,
    links: Vec<Vec<usize>>,
    tables: Vec<Vec<u32>>,
    /// For each locus `l`: the components whose index depends on `l`, with the
    /// index bit that flipping `l` toggles.
    dependents: Vec<Vec<(usize, usize)>>,
}

impl fmt::Debug for NkqLandscape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("NkqLandscape")
            .field("n", &self.n)
            .field("k", &self.k)
            .field("q", &self.q)
            .field("mode", &self.mode)
            .field("seed", &self.seed)
            .finish_non_exhaustive()
    }
}

fn check_params(n: usize, k: usize, q: u32) -> Result<(), LandscapeError> {
    if n == 0 {
        return Err(LandscapeError::InvalidParameter(
            "n must be at least 1".into(),
        ));
    }
    if k >= n {
        return Err(LandscapeError::InvalidParameter(format!(
            "k must satisfy 0 <= k <= n-1 (got k={k}, n={n})"
        )));
    }
    if k > MAX_K {
        return Err(LandscapeError::InvalidParameter(format!(
            "k={k} exceeds the supported maximum {MAX_K}"
        )));
    }
    if q < 2 {
        return Err(LandscapeError::InvalidParameter(format!(
            "q must be at least 2 (got {q})"
        )));
    }
    Ok(())
}

/// Links for locus `i` in adjacent mode: `ceil(K/2)` loci to the left (farthest
/// first) then `floor(K/2)` to the right (nearest first), indices mod `n`.
pub fn adjacent_links(n: usize, k: usize, i: usize) -> Vec<usize> {
    let left = k.div_ceil(2);
    let right = k / 2;
    let mut out = Vec::with_capacity(k);
    for d in (1..=left).rev() {
        out.push((i + n - d % n) % n);
    }
    for d in 1..=right {
        out.push((i + d) % n);
    }
    out
}

/// Packs the alleles read by component `locus` into its table index: own allele
/// in bit 0, then `links[j]` in bit `j + 1`.
#[inline]
pub fn component_index(s: &Genotype, locus: usize, links: &[usize]) -> usize {
    links
        .iter()
        .enumerate()
        .fold(s.bit(locus), |acc, (j, &l)| acc | (s.bit(l) << (j + 1)))
}

impl NkqLandscape {
    /// Generates a landscape deterministically from its parameters and seed.
    pub fn generate(
        n: usize,
        k: usize,
        q: u32,
        mode: EpistasisMode,
        seed: u64,
    ) -> Result<Self, LandscapeError> {
        check_params(n, k, q)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let links: Vec<Vec<usize>> = (0..n)
            .map(|i| match mode {
                EpistasisMode::Adjacent => adjacent_links(n, k, i),
                EpistasisMode::Random => index::sample(&mut rng, n - 1, k)
                    .into_iter()
                    .map(|j| if j >= i { j + 1 } else { j })
                    .collect(),
            })
            .collect();
        let size = 1usize << (k + 1);
        let tables = (0..n)
            .map(|_| (0..size).map(|_| rng.gen_range(0..q)).collect())
            .collect();
        Self::from_parts(k, q, mode, seed, links, tables)
    }

    /// Builds a landscape from explicit links and tables, validating every invariant.
    pub fn from_parts(
        k: usize,
        q: u32,
        mode: EpistasisMode,
        seed: u64,
        links: Vec<Vec<usize>>,
        tables: Vec<Vec<u32>>,
    ) -> Result<Self, LandscapeError> {
        let n = links.len();
        check_params(n, k, q)?;
        if tables.len() != n {
            return Err(LandscapeError::InvalidParameter(format!(
                "{} component tables for {n} loci",
                tables.len()
            )));
        }
        for (i, l) in links.iter().enumerate() {
            validate_links(n, k, i, l).map_err(LandscapeError::InvalidParameter)?;
        }
        for (i, t) in tables.iter().enumerate() {
            validate_table(k, q, t)
                .map_err(|m| LandscapeError::InvalidParameter(format!("table {i}: {m}")))?;
        }
        let mut dependents = vec![Vec::new(); n];
        for (c, l) in links.iter().enumerate() {
            dependents[c].push((c, 1));
            for (j, &locus) in l.iter().enumerate() {
                dependents[locus].push((c, 1 << (j + 1)));
            }
        }
        Ok(Self {
            n,
            k,
            q,
            mode,
            seed,
            links,
            tables,
            dependents,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn mode(&self) -> EpistasisMode {
        self.mode
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn links(&self) -> &[Vec<usize>] {
        &self.links
    }

    pub fn tables(&self) -> &[Vec<u32>] {
        &self.tables
    }

    /// `N (q-1)`, the largest possible total.
    pub fn scale(&self) -> u64 {
        self.n as u64 * (self.q as u64 - 1)
    }

    pub fn fitness(&self, total: u64) -> Fitness {
        Fitness {
            total,
            scale: self.scale(),
        }
    }

    /// Table index read by component `locus` for genotype `s`.
    pub fn component_index(&self, s: &Genotype, locus: usize) -> usize {
        component_index(s, locus, &self.links[locus])
    }

    /// Full evaluation. Counts one fitness query.
    pub fn evaluate(
        &self,
        s: &Genotype,
        counter: &mut EvalCounter,
    ) -> Result<Fitness, LandscapeError> {
        if s.len() != self.n {
            return Err(LandscapeError::LengthMismatch {
                expected: self.n,
                found: s.len(),
            });
        }
        counter.tick();
        Ok(self.fitness(self.total_of(s)))
    }

    /// Fitness of `s` with `locus` flipped, given `total = evaluate(s).total`.
    /// Only the components that read `locus` are recomputed. Counts one query.
    #[inline]
    pub fn delta_evaluate(
        &self,
        s: &Genotype,
        total: u64,
        locus: usize,
        counter: &mut EvalCounter,
    ) -> Fitness {
        counter.tick();
        self.fitness(self.flip_total(s, total, locus))
    }

    pub(crate) fn total_of(&self, s: &Genotype) -> u64 {
        (0..self.n)
            .map(|i| self.tables[i][self.component_index(s, i)] as u64)
            .sum()
    }

    #[inline]
    pub(crate) fn flip_total(&self, s: &Genotype, total: u64, locus: usize) -> u64 {
        let mut removed = 0u64;
        let mut added = 0u64;
        for &(c, mask) in &self.dependents[locus] {
            let idx = self.component_index(s, c);
            let table = &self.tables[c];
            removed += table[idx] as u64;
            added += table[idx ^ mask] as u64;
        }
        total - removed + added
    }

    pub(crate) fn check_genotype(&self, s: &Genotype) -> Result<(), LandscapeError> {
        if s.len() == self.n {
            Ok(())
        } else {
            Err(LandscapeError::LengthMismatch {
                expected: self.n,
                found: s.len(),
            })
        }
    }

    /// Serializes to the landscape text document.
    pub fn to_text(&self) -> String {
        self.to_string()
    }

    /// Parses a landscape text document.
    pub fn from_text(text: &str) -> Result<Self, LandscapeError> {
        text.parse()
    }
}

fn validate_links(n: usize, k: usize, i: usize, links: &[usize]) -> Result<(), String> {
    if links.len() != k {
        return Err(format!(
            "locus {i} has {} links, expected k={k}",
            links.len()
        ));
    }
    for (j, &l) in links.iter().enumerate() {
        if l >= n {
            return Err(format!("locus {i} links to {l}, outside 0..{n}"));
        }
        if l == i {
            return Err(format!("locus {i} links to itself"));
        }
        if links[..j].contains(&l) {
            return Err(format!("locus {i} links to {l} twice"));
        }
    }
    Ok(())
}

fn validate_table(k: usize, q: u32, table: &[u32]) -> Result<(), String> {
    let size = 1usize << (k + 1);
    if table.len() != size {
        return Err(format!("{} entries, expected 2^(k+1)={size}", table.len()));
    }
    if let Some((idx, v)) = table.iter().enumerate().find(|(_, &v)| v >= q) {
        return Err(format!("entry {idx} is {v}, outside [0, {}]", q - 1));
    }
    Ok(())
}

/// Landscape document:
///
/// ```text
/// # nkq-landscape
/// format-version = 1
/// n = 4
/// k = 1
/// q = 2
/// mode = random
/// seed = 7
/// 0 3 1 0 0 1
/// 1 0 ...
/// ```
///
/// One line per locus after the header: locus index, the `K` links in stored
/// order, then the `2^(K+1)` table entries.
impl fmt::Display for NkqLandscape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "# nkq-landscape")?;
        writeln!(f, "format-version = {FORMAT_VERSION}")?;
        writeln!(f, "n = {}", self.n)?;
        writeln!(f, "k = {}", self.k)?;
        writeln!(f, "q = {}", self.q)?;
        writeln!(f, "mode = {}", self.mode)?;
        writeln!(f, "seed = {}", self.seed)?;
        for i in 0..self.n {
            write!(f, "{i}")?;
            for l in &self.links[i] {
                write!(f, " {l}")?;
            }
            for v in &self.tables[i] {
                write!(f, " {v}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

fn parse_err(line: usize, field: &str, message: impl Into<String>) -> LandscapeError {
    LandscapeError::Parse {
        line,
        field: field.to_string(),
        message: message.into(),
    }
}

fn parse_num<T: FromStr>(line: usize, field: &str, raw: &str) -> Result<T, LandscapeError> {
    raw.parse()
        .map_err(|_| parse_err(line, field, format!("`{raw}` is not a valid number")))
}

impl FromStr for NkqLandscape {
    type Err = LandscapeError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let mut header: HashMap<String, (usize, String)> = HashMap::new();
        let mut loci: Vec<(usize, &str)> = Vec::new();
        let mut last_line = 0;

        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            last_line = line;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            if let Some((key, value)) = trimmed.split_once('=') {
                if !loci.is_empty() {
                    return Err(parse_err(
                        line,
                        key.trim(),
                        "header entry after locus lines",
                    ));
                }
                let key = key.trim().to_string();
                if header.contains_key(&key) {
                    return Err(parse_err(line, &key, "duplicate header entry"));
                }
                header.insert(key, (line, value.trim().to_string()));
            } else {
                loci.push((line, trimmed));
            }
        }

        let field = |name: &str| {
            header
                .get(name)
                .map(|(l, v)| (*l, v.as_str()))
                .ok_or_else(|| parse_err(last_line, name, "missing header entry"))
        };

        let (l, v) = field("format-version")?;
        let version: u32 = parse_num(l, "format-version", v)?;
        if version != FORMAT_VERSION {
            return Err(parse_err(
                l,
                "format-version",
                format!("unsupported version {version}"),
            ));
        }
        let (ln, v) = field("n")?;
        let n: usize = parse_num(ln, "n", v)?;
        let (lk, v) = field("k")?;
        let k: usize = parse_num(lk, "k", v)?;
        let (lq, v) = field("q")?;
        let q: u32 = parse_num(lq, "q", v)?;
        let (l, v) = field("mode")?;
        let mode: EpistasisMode = v.parse().map_err(|m: String| parse_err(l, "mode", m))?;
        let (l, v) = field("seed")?;
        let seed: u64 = parse_num(l, "seed", v)?;
        check_params(n, k, q).map_err(|e| parse_err(ln, "n/k/q", e.to_string()))?;
        if let Some(key) = header
            .keys()
            .find(|key| !["format-version", "n", "k", "q", "mode", "seed"].contains(&key.as_str()))
        {
            return Err(parse_err(header[key].0, key, "unknown header entry"));
        }

        if loci.len() != n {
            return Err(parse_err(
                loci.last().map_or(last_line, |(l, _)| *l),
                "loci",
                format!("found {} locus lines, expected n={n}", loci.len()),
            ));
        }

        let size = 1usize << (k + 1);
        let mut links = Vec::with_capacity(n);
        let mut tables = Vec::with_capacity(n);
        for (expected, (line, body)) in loci.into_iter().enumerate() {
            let tokens: Vec<&str> = body.split_whitespace().collect();
            if tokens.len() != 1 + k + size {
                return Err(parse_err(
                    line,
                    "locus",
                    format!(
                        "expected {} values (index, {k} links, {size} entries), found {}",
                        1 + k + size,
                        tokens.len()
                    ),
                ));
            }
            let index: usize = parse_num(line, "locus", tokens[0])?;
            if index != expected {
                return Err(parse_err(
                    line,
                    "locus",
                    format!("expected locus {expected}, found {index}"),
                ));
            }
            let l = tokens[1..=k]
                .iter()
                .map(|t| parse_num(line, "links", t))
                .collect::<Result<Vec<usize>, _>>()?;
            validate_links(n, k, index, &l).map_err(|m| parse_err(line, "links", m))?;
            let t = tokens[1 + k..]
                .iter()
                .map(|t| parse_num(line, "table", t))
                .collect::<Result<Vec<u32>, _>>()?;
            validate_table(k, q, &t).map_err(|m| parse_err(line, "table", m))?;
            links.push(l);
            tables.push(t);
        }
        Self::from_parts(k, q, mode, seed, links, tables)
    }
}
