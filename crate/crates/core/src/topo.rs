//! Topology name grammar: parsing, validation, and canonical printing.
//!
//! A topology name is an underscore-joined token list: a core-count token
//! (`5C`), cache-group tokens (`5DL1`, `2IL1`, `1L3`), and an optional
//! trailing `BP` bypass marker. Tokens are case-sensitive and must appear
//! in canonical order: cores first, then groups sorted by level and, within
//! a level, data before instruction before unified.

use std::fmt;
use thiserror::Error;

/// Role a cache group plays in the hierarchy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CacheRole {
    /// `DL<x>` — data-only cache.
    Data,
    /// `IL<x>` — instruction-only cache.
    Instruction,
    /// `L<x>` — shared data/instruction cache.
    Unified,
}

impl CacheRole {
    pub fn token_prefix(self) -> &'static str {
        match self {
            CacheRole::Data => "DL",
            CacheRole::Instruction => "IL",
            CacheRole::Unified => "L",
        }
    }

    /// Ordering rank inside a level: Data < Instruction < Unified.
    fn rank(self) -> u8 {
        match self {
            CacheRole::Data => 0,
            CacheRole::Instruction => 1,
            CacheRole::Unified => 2,
        }
    }
}

impl fmt::Display for CacheRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CacheRole::Data => "data",
            CacheRole::Instruction => "instruction",
            CacheRole::Unified => "unified",
        })
    }
}

/// One group of same-level, same-role caches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CacheGroup {
    pub level: u8,
    pub role: CacheRole,
    pub count: u32,
}

impl CacheGroup {
    pub fn new(level: u8, role: CacheRole, count: u32) -> Self {
        CacheGroup { level, role, count }
    }

    pub fn token(&self) -> String {
        format!("{}{}{}", self.count, self.role.token_prefix(), self.level)
    }

    fn order_key(&self) -> (u8, u8) {
        (self.level, self.role.rank())
    }
}

/// Structured form of a topology name.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TopologySpec {
    pub cores: u32,
    /// Sorted by (level, role rank); at most one group per (level, role).
    pub groups: Vec<CacheGroup>,
    pub bypass: bool,
}

/// Errors produced by name parsing and spec validation.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TopoError {
    /// Token-level syntax problem: bad letters, wrong order, duplicates,
    /// zero counts, stray underscores.
    #[error("malformed topology name: {0}")]
    MalformedName(String),
    /// Syntactically fine but structurally invalid hierarchy.
    #[error("topology rule violation: {0}")]
    RuleViolation(String),
}

impl TopoError {
    fn malformed(msg: impl Into<String>) -> Self {
        TopoError::MalformedName(msg.into())
    }

    fn rule(msg: impl Into<String>) -> Self {
        TopoError::RuleViolation(msg.into())
    }
}

impl TopologySpec {
    pub fn new(cores: u32, groups: Vec<CacheGroup>, bypass: bool) -> Self {
        TopologySpec { cores, groups, bypass }
    }

    pub fn group(&self, level: u8, role: CacheRole) -> Option<&CacheGroup> {
        self.groups.iter().find(|g| g.level == level && g.role == role)
    }

    pub fn count(&self, level: u8, role: CacheRole) -> u32 {
        self.group(level, role).map_or(0, |g| g.count)
    }

    /// Number of caches serving the data stream at `level` (data group if
    /// present, else unified), 0 when the level is absent from the chain.
    pub fn data_serving(&self, level: u8) -> u32 {
        match self.count(level, CacheRole::Data) {
            0 => self.count(level, CacheRole::Unified),
            n => n,
        }
    }

    /// Data-stream counterpart of [`TopologySpec::data_serving`] for the
    /// instruction stream.
    pub fn instr_serving(&self, level: u8) -> u32 {
        match self.count(level, CacheRole::Instruction) {
            0 => self.count(level, CacheRole::Unified),
            n => n,
        }
    }

    /// Highest level that has any cache group, 0 when there are none.
    pub fn top_level(&self) -> u8 {
        self.groups.iter().map(|g| g.level).max().unwrap_or(0)
    }

    /// Highest level with a split instruction group, if any.
    pub fn instr_split_top(&self) -> Option<u8> {
        self.groups
            .iter()
            .filter(|g| g.role == CacheRole::Instruction)
            .map(|g| g.level)
            .max()
    }

    /// Highest level with a split data group, if any.
    pub fn data_split_top(&self) -> Option<u8> {
        self.groups
            .iter()
            .filter(|g| g.role == CacheRole::Data)
            .map(|g| g.level)
            .max()
    }

    pub fn has_split_groups(&self) -> bool {
        self.groups.iter().any(|g| g.role != CacheRole::Unified)
    }

    /// Checks every structural invariant; `Err` carries the first failure.
    pub fn validate(&self) -> Result<(), TopoError> {
        if self.cores == 0 {
            return Err(TopoError::rule("core count must be positive"));
        }
        for g in &self.groups {
            if g.count == 0 {
                return Err(TopoError::rule(format!("cache group {} has zero count", g.token())));
            }
            if !(1..=3).contains(&g.level) {
                return Err(TopoError::rule(format!("cache level {} out of range 1..3", g.level)));
            }
            if g.role != CacheRole::Unified && g.level > 2 {
                return Err(TopoError::rule(format!(
                    "split caches only exist at levels 1-2, got {}",
                    g.token()
                )));
            }
        }
        for pair in self.groups.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            if a.order_key() == b.order_key() {
                return Err(TopoError::rule(format!("duplicate cache group {}", b.token())));
            }
            if a.order_key() > b.order_key() {
                return Err(TopoError::rule(format!(
                    "cache groups out of canonical order: {} before {}",
                    a.token(),
                    b.token()
                )));
            }
        }
        for level in 1..=3u8 {
            let unified = self.count(level, CacheRole::Unified);
            let data = self.count(level, CacheRole::Data);
            let instr = self.count(level, CacheRole::Instruction);
            if unified > 0 && (data > 0 || instr > 0) {
                return Err(TopoError::rule(format!(
                    "level {level} mixes a unified cache with split caches"
                )));
            }
            if unified > 0 {
                // Chains never split again above a shared level.
                for upper in (level + 1)..=3 {
                    if self.count(upper, CacheRole::Data) > 0
                        || self.count(upper, CacheRole::Instruction) > 0
                    {
                        return Err(TopoError::rule(format!(
                            "split caches at level {upper} above a unified level {level}"
                        )));
                    }
                }
            }
        }

        // Level 1 must serve both streams of every core.
        if self.count(1, CacheRole::Unified) == 0
            && (self.count(1, CacheRole::Data) == 0 || self.count(1, CacheRole::Instruction) == 0)
        {
            return Err(TopoError::rule(
                "level 1 must have a unified cache or both data and instruction caches",
            ));
        }

        let top = self.top_level();

        // Data chain: contiguous from level 1 to the hierarchy top.
        for level in 1..=top {
            if self.data_serving(level) == 0 {
                return Err(TopoError::rule(format!("data chain has a gap at level {level}")));
            }
        }

        if self.bypass {
            if self.count(1, CacheRole::Data) == 0 || self.count(1, CacheRole::Instruction) == 0 {
                return Err(TopoError::rule("BP requires split data/instruction caches at level 1"));
            }
            if self.count(2, CacheRole::Data) == 0 {
                return Err(TopoError::rule("BP requires a level-2 data cache"));
            }
        } else {
            // Without a bypass the instruction chain must also be gapless
            // up to the hierarchy top.
            for level in 1..=top {
                if self.instr_serving(level) == 0 {
                    return Err(TopoError::rule(format!(
                        "instruction chain has a gap at level {level} (no BP)"
                    )));
                }
            }
        }

        // Chain counts never grow away from the cores (nc >= mc at every
        // adjacent populated pair, with the cores as level 0 of both chains).
        self.check_chain_monotone("data", |l| self.data_serving(l))?;
        if self.bypass {
            // Served prefix of the instruction chain, then the bypass landing.
            let mut seq = vec![self.cores];
            let split_top = self.instr_split_top().unwrap_or(0);
            for level in 1..=split_top {
                seq.push(self.count(level, CacheRole::Instruction));
            }
            let l3 = self.count(3, CacheRole::Unified);
            if l3 > 0 && split_top < 3 {
                seq.push(l3);
            }
            check_nonincreasing("instruction", &seq)?;
        } else {
            self.check_chain_monotone("instruction", |l| self.instr_serving(l))?;
        }
        Ok(())
    }

    fn check_chain_monotone(
        &self,
        chain: &str,
        serving: impl Fn(u8) -> u32,
    ) -> Result<(), TopoError> {
        let mut seq = vec![self.cores];
        for level in 1..=3u8 {
            let n = serving(level);
            if n > 0 {
                seq.push(n);
            }
        }
        check_nonincreasing(chain, &seq)
    }

    /// Canonical name; inverse of [`parse_topology`] for valid specs.
    pub fn canonical_name(&self) -> Result<String, TopoError> {
        self.validate()?;
        let mut tokens = vec![format!("{}C", self.cores)];
        tokens.extend(self.groups.iter().map(CacheGroup::token));
        if self.bypass {
            tokens.push("BP".to_string());
        }
        Ok(tokens.join("_"))
    }
}

fn check_nonincreasing(chain: &str, seq: &[u32]) -> Result<(), TopoError> {
    for pair in seq.windows(2) {
        if pair[1] > pair[0] {
            return Err(TopoError::rule(format!(
                "{chain} chain count grows from {} to {} going up",
                pair[0], pair[1]
            )));
        }
    }
    Ok(())
}

/// Parses a positive decimal without leading zeros.
fn parse_count(digits: &str, token: &str) -> Result<u32, TopoError> {
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(TopoError::malformed(format!("bad count in token '{token}'")));
    }
    if digits.starts_with('0') {
        return Err(TopoError::malformed(format!(
            "leading zero or zero count in token '{token}'"
        )));
    }
    digits
        .parse::<u32>()
        .map_err(|_| TopoError::malformed(format!("count out of range in token '{token}'")))
}

fn parse_cache_token(token: &str) -> Result<CacheGroup, TopoError> {
    let letters_at = token
        .bytes()
        .position(|b| !b.is_ascii_digit())
        .ok_or_else(|| TopoError::malformed(format!("token '{token}' has no cache letters")))?;
    let (digits, rest) = token.split_at(letters_at);
    let count = parse_count(digits, token)?;
    let (role, level_str) = if let Some(l) = rest.strip_prefix("DL") {
        (CacheRole::Data, l)
    } else if let Some(l) = rest.strip_prefix("IL") {
        (CacheRole::Instruction, l)
    } else if let Some(l) = rest.strip_prefix('L') {
        (CacheRole::Unified, l)
    } else {
        return Err(TopoError::malformed(format!("unknown cache token '{token}'")));
    };
    let level = match level_str {
        "1" => 1,
        "2" => 2,
        "3" if role == CacheRole::Unified => 3,
        _ => {
            return Err(TopoError::malformed(format!(
                "bad cache level in token '{token}'"
            )))
        }
    };
    Ok(CacheGroup::new(level, role, count))
}

/// Parses a topology name into a validated [`TopologySpec`].
pub fn parse_topology(name: &str) -> Result<TopologySpec, TopoError> {
    if name.is_empty() {
        return Err(TopoError::malformed("empty name"));
    }
    let mut tokens = name.split('_');
    let core_token = tokens.next().unwrap();
    let digits = core_token
        .strip_suffix('C')
        .ok_or_else(|| TopoError::malformed(format!("expected a core token, got '{core_token}'")))?;
    let cores = parse_count(digits, core_token)?;

    let mut groups: Vec<CacheGroup> = Vec::new();
    let mut bypass = false;
    for token in tokens {
        if bypass {
            return Err(TopoError::malformed(format!("token '{token}' after BP")));
        }
        if token == "BP" {
            bypass = true;
            continue;
        }
        let group = parse_cache_token(token)?;
        if let Some(last) = groups.last() {
            if group.order_key() == last.order_key() {
                return Err(TopoError::malformed(format!("duplicate cache group '{token}'")));
            }
            if group.order_key() < last.order_key() {
                return Err(TopoError::malformed(format!(
                    "cache token '{token}' out of order (expected level ascending, D/I/L within a level)"
                )));
            }
        }
        groups.push(group);
    }

    let spec = TopologySpec::new(cores, groups, bypass);
    spec.validate()?;
    Ok(spec)
}

/// Parses a topology list: one name per line, `#` comments and blank lines
/// skipped. Per-line failures are collected, never aborting the file.
pub fn load_topology_list(text: &str) -> Vec<(usize, Result<TopologySpec, TopoError>)> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        out.push((idx + 1, parse_topology(line)));
    }
    out
}
