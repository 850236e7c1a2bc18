//! Decision tree that selects the generation method for a topology.

use crate::topo::{CacheRole, TopoError, TopologySpec};
use std::fmt;

/// The five generation methods. Exactly one applies to every valid spec.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TopologyKind {
    /// Unified caches only.
    Regular,
    /// Split level-1 caches, no level-2 data cache.
    SemiHybrid,
    /// Split data chain through level 2, no bypass.
    Hybrid,
    /// Bypass with no level-2 instruction cache: IL1s skip level 2.
    Bypass2,
    /// Bypass with level-2 instruction caches: IL2s reach the last level
    /// through the switch network.
    Bypass3,
}

impl TopologyKind {
    /// Human-readable method name.
    pub fn label(self) -> &'static str {
        match self {
            TopologyKind::Regular => "Regular",
            TopologyKind::SemiHybrid => "Semi-Hybrid",
            TopologyKind::Hybrid => "Hybrid",
            TopologyKind::Bypass2 => "2nd Level Bypass",
            TopologyKind::Bypass3 => "3rd Level Bypass",
        }
    }

    pub fn is_bypass(self) -> bool {
        matches!(self, TopologyKind::Bypass2 | TopologyKind::Bypass3)
    }
}

impl fmt::Display for TopologyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TopologyKind::Regular => "Regular",
            TopologyKind::SemiHybrid => "SemiHybrid",
            TopologyKind::Hybrid => "Hybrid",
            TopologyKind::Bypass2 => "Bypass2",
            TopologyKind::Bypass3 => "Bypass3",
        })
    }
}

/// Walks the decision tree for a valid spec:
/// no split caches -> Regular; no level-2 data group -> SemiHybrid;
/// no bypass -> Hybrid; no level-2 instruction group -> Bypass2;
/// otherwise Bypass3.
pub fn classify(spec: &TopologySpec) -> Result<TopologyKind, TopoError> {
    spec.validate()?;
    Ok(classify_valid(spec))
}

pub(crate) fn classify_valid(spec: &TopologySpec) -> TopologyKind {
    if !spec.has_split_groups() {
        TopologyKind::Regular
    } else if spec.count(2, CacheRole::Data) == 0 {
        TopologyKind::SemiHybrid
    } else if !spec.bypass {
        TopologyKind::Hybrid
    } else if spec.count(2, CacheRole::Instruction) == 0 {
        TopologyKind::Bypass2
    } else {
        TopologyKind::Bypass3
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topo::parse_topology;

    fn kind(name: &str) -> TopologyKind {
        classify(&parse_topology(name).unwrap()).unwrap()
    }

    #[test]
    fn classifies_reference_examples() {
        assert_eq!(kind("2C_2L1_2L2_1L3"), TopologyKind::Regular);
        assert_eq!(kind("4C_4DL1_2IL1_1L2"), TopologyKind::SemiHybrid);
        assert_eq!(kind("3C_3DL1_3IL1_3DL2_1IL2_1L3"), TopologyKind::Hybrid);
        assert_eq!(kind("5C_5DL1_2IL1_2DL2_BP"), TopologyKind::Bypass2);
        assert_eq!(kind("4C_4DL1_2IL1_2DL2_2IL2_1L3_BP"), TopologyKind::Bypass3);
    }

    #[test]
    fn semi_hybrid_allows_unified_upper_levels() {
        // A unified L2 is not a level-2 *data* group.
        assert_eq!(kind("18C_9DL1_6IL1_3L2"), TopologyKind::SemiHybrid);
        assert_eq!(kind("2C_2DL1_2IL1"), TopologyKind::SemiHybrid);
    }

    #[test]
    fn bypass_flag_matches_bypass_kinds() {
        for name in [
            "1C_1L1",
            "2C_2L1_2L2_1L3",
            "4C_4DL1_2IL1_1L2",
            "3C_3DL1_3IL1_3DL2_1IL2_1L3",
            "2C_2DL1_2IL1_1DL2_1L3_BP",
            "32C_23DL1_17IL1_12DL2_4L3_BP",
            "37C_28DL1_19IL1_13DL2_8IL2_5L3_BP",
        ] {
            let spec = parse_topology(name).unwrap();
            assert_eq!(classify(&spec).unwrap().is_bypass(), spec.bypass, "{name}");
        }
    }

    #[test]
    fn rejects_invalid_spec() {
        let bad = crate::topo::TopologySpec::new(0, vec![], false);
        assert!(classify(&bad).is_err());
    }
}
