//! Independent structural validation of architecture graphs.
//!
//! The checks here derive the expected structure straight from the topology
//! spec and share no wiring code with the generator: component cardinality,
//! per-level connection counts and placement (floor(nc/mc) per upper with
//! the remainder on the lowest-indexed uppers), bypass switch structure,
//! layering, acyclicity, and memory reachability. Violations accumulate;
//! nothing fails fast.

use crate::graph::{ArchGraph, ComponentId, ComponentKind, Stream};
use crate::topo::{CacheRole, TopologySpec};
use std::collections::VecDeque;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViolationCode {
    CardinalityMismatch,
    SwitchPresence,
    EdgeCount,
    FanInSpread,
    FanInPlacement,
    MissingParent,
    MultipleParents,
    StreamMismatch,
    UnexpectedEdge,
    SwitchDegree,
    SwitchMixedFamily,
    SwitchUpward,
    BypassDirectEdge,
    LandingAttachment,
    RankOrder,
    Cycle,
    Unreachable,
}

/// What a violation is about: one component, one level pair, or the graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Subject {
    Component(ComponentId),
    LevelPair(String),
    Graph,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub code: ViolationCode,
    pub subject: Subject,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }

    fn push(&mut self, code: ViolationCode, subject: Subject, message: impl Into<String>) {
        self.violations.push(Violation { code, subject, message: message.into() });
    }

    fn merge(&mut self, other: ValidationReport) {
        self.violations.extend(other.violations);
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ok() {
            return writeln!(f, "ok");
        }
        for v in &self.violations {
            writeln!(f, "{:?}: {}", v.code, v.message)?;
        }
        Ok(())
    }
}

/// Compares component counts against the spec: per-family cache counts,
/// core count, exactly one main memory, dense 1-based indexes, and switch
/// presence exactly when the spec carries the bypass flag.
pub fn validate_cardinality(graph: &ArchGraph, spec: &TopologySpec) -> ValidationReport {
    let mut report = ValidationReport::default();

    let cores = graph.cores().len();
    if cores as u32 != spec.cores {
        report.push(
            ViolationCode::CardinalityMismatch,
            Subject::Graph,
            format!("core count {} differs from spec {}", cores, spec.cores),
        );
    }

    for level in 1..=3u8 {
        for role in [CacheRole::Data, CacheRole::Instruction, CacheRole::Unified] {
            let family = graph.cache_family(level, role);
            let expected = spec.count(level, role) as usize;
            if family.len() != expected {
                report.push(
                    ViolationCode::CardinalityMismatch,
                    Subject::LevelPair(format!("{role} level {level}")),
                    format!(
                        "{} {role} caches at level {level}, spec wants {}",
                        family.len(),
                        expected
                    ),
                );
            }
            let mut indexes: Vec<u32> = family
                .iter()
                .filter_map(|&id| match graph.component(id).kind {
                    ComponentKind::Cache { index, .. } => Some(index),
                    _ => None,
                })
                .collect();
            indexes.sort_unstable();
            if indexes.iter().enumerate().any(|(i, &idx)| idx != i as u32 + 1) {
                report.push(
                    ViolationCode::CardinalityMismatch,
                    Subject::LevelPair(format!("{role} level {level}")),
                    format!("cache indexes at level {level} ({role}) are not dense from 1"),
                );
            }
        }
    }

    let memories = graph
        .components
        .iter()
        .filter(|c| c.kind == ComponentKind::MainMemory)
        .count();
    if memories != 1 {
        report.push(
            ViolationCode::CardinalityMismatch,
            Subject::Graph,
            format!("expected exactly one main memory, found {memories}"),
        );
    }

    let switches = graph.switches().len();
    if spec.bypass && switches == 0 {
        report.push(
            ViolationCode::SwitchPresence,
            Subject::Graph,
            "bypass spec but the graph has no switches",
        );
    }
    if !spec.bypass && switches > 0 {
        report.push(
            ViolationCode::SwitchPresence,
            Subject::Graph,
            format!("non-bypass spec but the graph has {switches} switches"),
        );
    }

    report
}

/// Identifies a cache family or memory as the upper side of a relation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Upper {
    Family(u8, CacheRole),
    Memory,
}

/// The next family a chain hop connects to. Independent re-derivation from
/// the spec, used only for validation.
fn expected_upper(spec: &TopologySpec, level: u8, role: CacheRole) -> Upper {
    for l in (level + 1)..=3 {
        if role != CacheRole::Unified && spec.count(l, role) > 0 {
            return Upper::Family(l, role);
        }
        if spec.count(l, CacheRole::Unified) > 0 {
            return Upper::Family(l, CacheRole::Unified);
        }
    }
    Upper::Memory
}

struct Relation {
    label: String,
    lowers: Vec<ComponentId>,
    uppers: Vec<ComponentId>,
    stream: Stream,
    /// Wired through the bypass switch network instead of direct edges.
    switched: bool,
}

fn expected_relations(graph: &ArchGraph, spec: &TopologySpec) -> Vec<Relation> {
    let memory = graph.memory().into_iter().collect::<Vec<_>>();
    let landing_upper = if spec.count(3, CacheRole::Unified) > 0 {
        Upper::Family(3, CacheRole::Unified)
    } else {
        Upper::Memory
    };

    let mut relations = Vec::new();
    let cores = graph.cores();
    if spec.count(1, CacheRole::Unified) > 0 {
        relations.push(Relation {
            label: "cores -> l1".into(),
            lowers: cores,
            uppers: graph.cache_family(1, CacheRole::Unified),
            stream: Stream::Both,
            switched: false,
        });
    } else {
        relations.push(Relation {
            label: "cores -> dl1".into(),
            lowers: cores.clone(),
            uppers: graph.cache_family(1, CacheRole::Data),
            stream: Stream::Data,
            switched: false,
        });
        relations.push(Relation {
            label: "cores -> il1".into(),
            lowers: cores,
            uppers: graph.cache_family(1, CacheRole::Instruction),
            stream: Stream::Instruction,
            switched: false,
        });
    }

    for group in &spec.groups {
        let upper = expected_upper(spec, group.level, group.role);
        let uppers = match upper {
            Upper::Family(l, r) => graph.cache_family(l, r),
            Upper::Memory => memory.clone(),
        };
        let stream = match group.role {
            CacheRole::Data => Stream::Data,
            CacheRole::Instruction => Stream::Instruction,
            CacheRole::Unified => Stream::Both,
        };
        let switched = spec.bypass && group.role != CacheRole::Unified && upper == landing_upper;
        let upper_label = match upper {
            Upper::Family(l, r) => format!("{}{}", r.token_prefix().to_lowercase(), l),
            Upper::Memory => "mm".into(),
        };
        relations.push(Relation {
            label: format!(
                "{}{} -> {}{}",
                group.role.token_prefix().to_lowercase(),
                group.level,
                upper_label,
                if switched { " (switched)" } else { "" }
            ),
            lowers: graph.cache_family(group.level, group.role),
            uppers,
            stream,
            switched,
        });
    }
    relations
}

/// Expected fan-in for the upper at `position` (0-based, id order): the
/// remainder connections go one each to the lowest-indexed uppers.
fn expected_fan_in(nc: usize, mc: usize, position: usize) -> usize {
    nc / mc + usize::from(position < nc % mc)
}

fn check_direct_relation(
    graph: &ArchGraph,
    rel: &Relation,
    consumed: &mut [bool],
    report: &mut ValidationReport,
) {
    if rel.lowers.is_empty() || rel.uppers.is_empty() {
        return; // cardinality already complained
    }
    let nc = rel.lowers.len();
    let mc = rel.uppers.len();

    let mut edges_per_lower = vec![0usize; rel.lowers.len()];
    let mut fan_in = vec![0usize; rel.uppers.len()];
    let mut total = 0usize;
    for (idx, conn) in graph.connections.iter().enumerate() {
        let Some(li) = rel.lowers.iter().position(|&id| id == conn.lower) else { continue };
        let Some(ui) = rel.uppers.iter().position(|&id| id == conn.upper) else { continue };
        consumed[idx] = true;
        total += 1;
        edges_per_lower[li] += 1;
        fan_in[ui] += 1;
        if conn.stream != rel.stream {
            report.push(
                ViolationCode::StreamMismatch,
                Subject::Component(conn.lower),
                format!(
                    "{} -> {} carries {} traffic, expected {}",
                    graph.name(conn.lower),
                    graph.name(conn.upper),
                    conn.stream,
                    rel.stream
                ),
            );
        }
    }

    if total != nc {
        report.push(
            ViolationCode::EdgeCount,
            Subject::LevelPair(rel.label.clone()),
            format!("{}: {} connections, expected {}", rel.label, total, nc),
        );
    }
    for (li, &count) in edges_per_lower.iter().enumerate() {
        let id = rel.lowers[li];
        if count == 0 {
            report.push(
                ViolationCode::MissingParent,
                Subject::Component(id),
                format!("{} has no parent in {}", graph.name(id), rel.label),
            );
        } else if count > 1 {
            report.push(
                ViolationCode::MultipleParents,
                Subject::Component(id),
                format!("{} has {} parents in {}", graph.name(id), count, rel.label),
            );
        }
    }
    let spread = fan_in.iter().max().unwrap_or(&0) - fan_in.iter().min().unwrap_or(&0);
    if spread > 1 {
        report.push(
            ViolationCode::FanInSpread,
            Subject::LevelPair(rel.label.clone()),
            format!("{}: fan-ins {:?} spread by more than 1", rel.label, fan_in),
        );
    }
    for (ui, &got) in fan_in.iter().enumerate() {
        let want = expected_fan_in(nc, mc, ui);
        if got != want {
            report.push(
                ViolationCode::FanInPlacement,
                Subject::Component(rel.uppers[ui]),
                format!(
                    "{}: {} has fan-in {}, expected {} (remainder goes to the first uppers)",
                    rel.label,
                    graph.name(rel.uppers[ui]),
                    got,
                    want
                ),
            );
        }
    }
}

/// Follows upward edges from a bypass family member through switches to the
/// component the switch network delivers it to.
fn landing_through_switches(graph: &ArchGraph, member: ComponentId) -> Option<ComponentId> {
    let mut current = member;
    for _ in 0..=graph.components.len() {
        let ups = graph.upward(current);
        if ups.len() != 1 {
            return None;
        }
        let upper = ups[0].upper;
        if matches!(graph.component(upper).kind, ComponentKind::Switch(_)) {
            current = upper;
        } else {
            return if current == member { None } else { Some(upper) };
        }
    }
    None
}

fn check_switched_families(
    graph: &ArchGraph,
    relations: &[Relation],
    landings: &[ComponentId],
    consumed: &mut [bool],
    report: &mut ValidationReport,
) {
    let switched: Vec<&Relation> = relations.iter().filter(|r| r.switched).collect();
    if switched.is_empty() {
        return;
    }

    // Family member edges: exactly one upward Network edge into a switch.
    for rel in &switched {
        for &member in &rel.lowers {
            let mut ups = Vec::new();
            for (idx, conn) in graph.connections.iter().enumerate() {
                if conn.lower == member
                    && matches!(graph.component(conn.upper).kind, ComponentKind::Switch(_))
                {
                    consumed[idx] = true;
                    ups.push(conn);
                }
            }
            let direct: Vec<_> =
                graph.upward(member).into_iter().filter(|c| landings.contains(&c.upper)).collect();
            if !direct.is_empty() {
                report.push(
                    ViolationCode::BypassDirectEdge,
                    Subject::Component(member),
                    format!(
                        "{} connects to the last level directly instead of through switches",
                        graph.name(member)
                    ),
                );
            }
            match ups.len() {
                0 => report.push(
                    ViolationCode::MissingParent,
                    Subject::Component(member),
                    format!("{} has no switch uplink ({})", graph.name(member), rel.label),
                ),
                1 => {
                    if ups[0].stream != Stream::Network {
                        report.push(
                            ViolationCode::StreamMismatch,
                            Subject::Component(member),
                            format!("{} uplink is not a network link", graph.name(member)),
                        );
                    }
                }
                n => report.push(
                    ViolationCode::MultipleParents,
                    Subject::Component(member),
                    format!("{} has {} switch uplinks", graph.name(member), n),
                ),
            }
        }
    }

    // Switch edges: one upward link each, toward another switch or a landing.
    let switches = graph.switches();
    let mut memory_side: Vec<ComponentId> = Vec::new();
    for &sw in &switches {
        let mut ups = Vec::new();
        for (idx, conn) in graph.connections.iter().enumerate() {
            if conn.lower == sw {
                let fine = matches!(graph.component(conn.upper).kind, ComponentKind::Switch(_))
                    || landings.contains(&conn.upper);
                if fine {
                    consumed[idx] = true;
                    ups.push(conn);
                    if conn.stream != Stream::Network {
                        report.push(
                            ViolationCode::StreamMismatch,
                            Subject::Component(sw),
                            format!("{} uplink is not a network link", graph.name(sw)),
                        );
                    }
                }
            }
        }
        match ups.len() {
            1 => {
                if landings.contains(&ups[0].upper) {
                    memory_side.push(sw);
                }
            }
            n => report.push(
                ViolationCode::SwitchUpward,
                Subject::Component(sw),
                format!("{} has {} upward links, expected exactly 1", graph.name(sw), n),
            ),
        }
    }

    // Lower-side degrees: pairs or triples below, except memory-side
    // switches which take one feed per family.
    for &sw in &switches {
        let degree = graph.incoming(sw).len();
        if degree > 3 {
            report.push(
                ViolationCode::SwitchDegree,
                Subject::Component(sw),
                format!("{} has {} lower-side connections (max 3)", graph.name(sw), degree),
            );
        }
        if memory_side.contains(&sw) {
            if degree != switched.len() {
                report.push(
                    ViolationCode::SwitchDegree,
                    Subject::Component(sw),
                    format!(
                        "memory-side {} has {} feeds, expected one per family ({})",
                        graph.name(sw),
                        degree,
                        switched.len()
                    ),
                );
            }
        } else if !(2..=3).contains(&degree) {
            report.push(
                ViolationCode::SwitchDegree,
                Subject::Component(sw),
                format!("{} has {} lower-side connections, expected 2 or 3", graph.name(sw), degree),
            );
        }
    }

    // Family purity: a non-memory-side switch aggregates exactly one family.
    for &sw in &switches {
        if memory_side.contains(&sw) {
            continue;
        }
        let mut seen = VecDeque::from([sw]);
        let mut families = Vec::new();
        let mut guard = 0;
        while let Some(node) = seen.pop_front() {
            guard += 1;
            if guard > graph.components.len() + graph.connections.len() {
                break;
            }
            for conn in graph.incoming(node) {
                match graph.component(conn.lower).kind {
                    ComponentKind::Switch(_) => seen.push_back(conn.lower),
                    ComponentKind::Cache { level, role, .. } => {
                        if !families.contains(&(level, role)) {
                            families.push((level, role));
                        }
                    }
                    _ => {}
                }
            }
        }
        if families.len() > 1 {
            report.push(
                ViolationCode::SwitchMixedFamily,
                Subject::Component(sw),
                format!("{} aggregates more than one cache family", graph.name(sw)),
            );
        }
    }

    // Landings accept exactly one switch feed and nothing else from the
    // switched families; family members spread fairly across landings.
    for &landing in landings {
        let feeds: Vec<_> = graph
            .incoming(landing)
            .into_iter()
            .filter(|c| matches!(graph.component(c.lower).kind, ComponentKind::Switch(_)))
            .collect();
        if feeds.len() != 1 {
            report.push(
                ViolationCode::LandingAttachment,
                Subject::Component(landing),
                format!(
                    "{} is fed by {} switches, expected exactly 1",
                    graph.name(landing),
                    feeds.len()
                ),
            );
        }
    }
    for rel in &switched {
        let nc = rel.lowers.len();
        let mc = landings.len();
        if nc == 0 || mc == 0 {
            continue;
        }
        let mut per_landing = vec![0usize; mc];
        for &member in &rel.lowers {
            if let Some(landed) = landing_through_switches(graph, member) {
                if let Some(pos) = landings.iter().position(|&l| l == landed) {
                    per_landing[pos] += 1;
                }
            }
        }
        for (pos, &got) in per_landing.iter().enumerate() {
            let want = expected_fan_in(nc, mc, pos);
            if got != want {
                report.push(
                    ViolationCode::FanInPlacement,
                    Subject::Component(landings[pos]),
                    format!(
                        "{}: {} receives {} of the family, expected {}",
                        rel.label,
                        graph.name(landings[pos]),
                        got,
                        want
                    ),
                );
            }
        }
    }
}

/// Re-counts every chain's connections against the quota arithmetic and
/// checks the bypass switch structure. Runs the cardinality pass first and
/// reports its findings when counts are off.
pub fn validate_connectivity(graph: &ArchGraph, spec: &TopologySpec) -> ValidationReport {
    let mut report = validate_cardinality(graph, spec);
    if !report.ok() {
        return report;
    }

    let relations = expected_relations(graph, spec);
    let mut consumed = vec![false; graph.connections.len()];

    for rel in relations.iter().filter(|r| !r.switched) {
        check_direct_relation(graph, rel, &mut consumed, &mut report);
    }

    if spec.bypass {
        let l3 = graph.cache_family(3, CacheRole::Unified);
        let landings = if l3.is_empty() {
            graph.memory().into_iter().collect::<Vec<_>>()
        } else {
            l3
        };
        check_switched_families(graph, &relations, &landings, &mut consumed, &mut report);
    }

    for (idx, conn) in graph.connections.iter().enumerate() {
        if !consumed[idx] {
            report.push(
                ViolationCode::UnexpectedEdge,
                Subject::Component(conn.lower),
                format!(
                    "unexpected connection {} -> {} [{}]",
                    graph.name(conn.lower),
                    graph.name(conn.upper),
                    conn.stream
                ),
            );
        }
    }

    report
}

fn check_structure(graph: &ArchGraph, report: &mut ValidationReport) {
    // Edges only point from lower layers to higher ones; equal ranks are
    // fine only inside the switch layer.
    for conn in &graph.connections {
        let lower = graph.component(conn.lower);
        let upper = graph.component(conn.upper);
        let both_switches = matches!(lower.kind, ComponentKind::Switch(_))
            && matches!(upper.kind, ComponentKind::Switch(_));
        if lower.rank() > upper.rank() || (lower.rank() == upper.rank() && !both_switches) {
            report.push(
                ViolationCode::RankOrder,
                Subject::Component(conn.lower),
                format!(
                    "connection {} -> {} points down or sideways in the hierarchy",
                    lower.name(),
                    upper.name()
                ),
            );
        }
    }

    // Kahn's algorithm for acyclicity.
    let n = graph.components.len();
    let mut out_degree = vec![0usize; n];
    let mut incoming: Vec<Vec<usize>> = vec![Vec::new(); n];
    for conn in &graph.connections {
        out_degree[conn.lower.0] += 1;
        incoming[conn.upper.0].push(conn.lower.0);
    }
    let mut queue: VecDeque<usize> =
        (0..n).filter(|&i| out_degree[i] == 0).collect();
    let mut processed = 0;
    while let Some(node) = queue.pop_front() {
        processed += 1;
        for &below in &incoming[node] {
            out_degree[below] -= 1;
            if out_degree[below] == 0 {
                queue.push_back(below);
            }
        }
    }
    if processed != n {
        report.push(ViolationCode::Cycle, Subject::Graph, "graph contains a cycle");
    }

    // Every component must reach main memory along upward edges.
    let memories: Vec<ComponentId> = graph
        .components
        .iter()
        .filter(|c| c.kind == ComponentKind::MainMemory)
        .map(|c| c.id)
        .collect();
    if let [memory] = memories[..] {
        let mut reached = vec![false; n];
        reached[memory.0] = true;
        let mut queue = VecDeque::from([memory]);
        while let Some(node) = queue.pop_front() {
            for conn in graph.incoming(node) {
                if !reached[conn.lower.0] {
                    reached[conn.lower.0] = true;
                    queue.push_back(conn.lower);
                }
            }
        }
        for (i, r) in reached.iter().enumerate() {
            if !r {
                report.push(
                    ViolationCode::Unreachable,
                    Subject::Component(ComponentId(i)),
                    format!("{} has no upward path to memory", graph.components[i].name()),
                );
            }
        }
    }
}

/// Full check: cardinality, connectivity, layering, acyclicity, and memory
/// reachability.
pub fn validate_graph(graph: &ArchGraph, spec: &TopologySpec) -> ValidationReport {
    let mut report = validate_connectivity(graph, spec);
    let mut structure = ValidationReport::default();
    check_structure(graph, &mut structure);
    report.merge(structure);
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, Connection};
    use crate::topo::parse_topology;

    fn graph_for(name: &str) -> ArchGraph {
        generate(&parse_topology(name).unwrap()).unwrap()
    }

    #[test]
    fn generated_graphs_validate() {
        for name in [
            "1C_1L1",
            "2C_2L1_2L2_1L3",
            "4C_4DL1_2IL1_1L2",
            "3C_3DL1_3IL1_3DL2_1IL2_1L3",
            "5C_5DL1_2IL1_2DL2_BP",
            "24C_24DL1_12IL1_6DL2_2L3_BP",
            "37C_28DL1_19IL1_13DL2_8IL2_5L3_BP",
        ] {
            let g = graph_for(name);
            let report = validate_graph(&g, &g.spec);
            assert!(report.ok(), "{name}:\n{report}");
        }
    }

    #[test]
    fn deleted_cache_breaks_cardinality() {
        let mut g = graph_for("5C_5DL1_2IL1_2DL2_BP");
        let victim = g.cache_family(1, CacheRole::Data)[4];
        g.components.retain(|c| c.id != victim);
        let report = validate_cardinality(&g, &g.spec);
        assert!(!report.ok());
        assert!(report.violations.iter().any(|v| v.code == ViolationCode::CardinalityMismatch));
    }

    #[test]
    fn switch_without_bypass_flag_is_flagged() {
        let mut g = graph_for("2C_2L1_1L2");
        g.components.push(crate::graph::Component {
            id: ComponentId(g.components.len()),
            kind: ComponentKind::Switch(1),
        });
        let report = validate_cardinality(&g, &g.spec);
        assert!(report.violations.iter().any(|v| v.code == ViolationCode::SwitchPresence));
    }

    #[test]
    fn rewired_edge_breaks_placement() {
        let mut g = graph_for("5C_5DL1_2IL1_2DL2_BP");
        // Move dl1-3's uplink from dl2-1 to dl2-2: fan-ins become {2,3}.
        let dl2 = g.cache_family(2, CacheRole::Data);
        let dl1 = g.cache_family(1, CacheRole::Data);
        let conn = g
            .connections
            .iter_mut()
            .find(|c| c.lower == dl1[2] && c.upper == dl2[0])
            .unwrap();
        conn.upper = dl2[1];
        let report = validate_connectivity(&g, &g.spec);
        assert!(report.violations.iter().any(|v| v.code == ViolationCode::FanInPlacement));
    }

    #[test]
    fn removed_connection_is_flagged() {
        let mut g = graph_for("2C_2L1_2L2_1L3");
        g.connections.remove(3);
        let report = validate_graph(&g, &g.spec);
        assert!(!report.ok());
    }

    #[test]
    fn back_edge_is_flagged() {
        let mut g = graph_for("2C_2L1_2L2_1L3");
        let l2 = g.cache_family(2, CacheRole::Unified);
        let l1 = g.cache_family(1, CacheRole::Unified);
        g.connections.push(Connection { lower: l2[0], upper: l1[0], stream: Stream::Both });
        let report = validate_graph(&g, &g.spec);
        assert!(report.violations.iter().any(|v| v.code == ViolationCode::RankOrder));
    }

    #[test]
    fn orphaned_cache_is_unreachable() {
        let mut g = graph_for("2C_2L1_1L2");
        let l1 = g.cache_family(1, CacheRole::Unified);
        g.connections.retain(|c| c.lower != l1[1]);
        let report = validate_graph(&g, &g.spec);
        assert!(report.violations.iter().any(|v| v.code == ViolationCode::Unreachable));
    }

    #[test]
    fn cross_family_switch_feed_is_flagged() {
        let mut g = graph_for("24C_24DL1_12IL1_6DL2_2L3_BP");
        // Redirect one IL1 pair switch's uplink into the DL2 tree.
        let il1 = g.cache_family(1, CacheRole::Instruction);
        let il1_switch = g.upward(il1[0])[0].upper;
        let dl2 = g.cache_family(2, CacheRole::Data);
        let dl2_switch = g.upward(dl2[0])[0].upper;
        let conn =
            g.connections.iter_mut().find(|c| c.lower == il1_switch).unwrap();
        conn.upper = dl2_switch;
        let report = validate_connectivity(&g, &g.spec);
        assert!(
            report.violations.iter().any(|v| v.code == ViolationCode::SwitchMixedFamily
                || v.code == ViolationCode::SwitchDegree),
            "{report}"
        );
    }

    #[test]
    fn validator_never_modifies_the_graph() {
        let g = graph_for("5C_5DL1_2IL1_2DL2_BP");
        let snapshot = g.clone();
        let _ = validate_graph(&g, &g.spec);
        assert_eq!(g, snapshot);
    }
}
