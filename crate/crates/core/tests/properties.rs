//! Property tests over randomized valid specs and hostile name strings.

mod common;

use proptest::prelude::*;
use topoforge::emit::{emit_bundle, CacheProfile};
use topoforge::graph::generate;
use topoforge::report::Scalar;
use topoforge::topo::{parse_topology, CacheGroup, TopologySpec};
use topoforge::validate::validate_graph;

fn arb_spec() -> impl Strategy<Value = TopologySpec> {
    (0u32..6, 1u32..=32, proptest::array::uniform5(1u32..=32), any::<bool>())
        .prop_map(|(shape, cores, raw, extra)| common::build_spec(shape, cores, raw, extra))
}

/// Mostly-hostile name material: arbitrary text plus near-misses built by
/// mutating one byte of a valid canonical name.
fn arb_name() -> impl Strategy<Value = String> {
    let mutated = (arb_spec(), any::<usize>(), any::<u8>()).prop_map(|(spec, pos, byte)| {
        let mut name = spec.canonical_name().expect("valid").into_bytes();
        let alphabet = b"0123456789CDILBP__x";
        if !name.is_empty() {
            let at = pos % name.len();
            name[at] = alphabet[byte as usize % alphabet.len()];
        }
        String::from_utf8_lossy(&name).into_owned()
    });
    prop_oneof![
        2 => mutated,
        1 => "[ -~]{0,24}",
        1 => arb_spec().prop_map(|s| s.canonical_name().expect("valid")),
    ]
}

proptest! {
    #[test]
    fn round_trip_identity(spec in arb_spec()) {
        let name = spec.canonical_name().expect("strategy yields valid specs");
        let reparsed = parse_topology(&name).expect("canonical names parse");
        prop_assert_eq!(reparsed, spec);
    }

    #[test]
    fn rejection_totality(name in arb_name()) {
        // Parsing never panics; anything accepted is a valid spec whose
        // canonical form round-trips.
        if let Ok(spec) = parse_topology(&name) {
            prop_assert!(spec.validate().is_ok());
            let canonical = spec.canonical_name().expect("accepted specs are valid");
            prop_assert_eq!(parse_topology(&canonical).expect("round-trip"), spec);
        }
    }

    #[test]
    fn generate_validate_closure(spec in arb_spec()) {
        let graph = generate(&spec).expect("valid specs generate");
        let report = validate_graph(&graph, &spec);
        prop_assert!(report.ok(), "{}", report);
        prop_assert!(common::brute_force_check(&graph, &spec).is_empty());
    }

    #[test]
    fn generation_is_deterministic(spec in arb_spec()) {
        let a = generate(&spec).expect("valid");
        let b = generate(&spec).expect("valid");
        prop_assert_eq!(&a, &b);
        prop_assert_eq!(a.to_edge_list(), b.to_edge_list());
    }

    #[test]
    fn emission_is_deterministic_bytes(spec in arb_spec()) {
        let graph = generate(&spec).expect("valid");
        let profile = CacheProfile::default();
        let a = emit_bundle(&graph, &profile).expect("emit");
        let b = emit_bundle(&graph, &profile).expect("emit");
        prop_assert_eq!(&a.mem_config, &b.mem_config);
        prop_assert_eq!(&a.net_config, &b.net_config);
        // Line endings are plain LF throughout.
        prop_assert!(!a.mem_config.contains('\r') && !a.net_config.contains('\r'));
    }

    #[test]
    fn loc_never_shrinks_when_hardware_grows(spec in arb_spec()) {
        let profile = CacheProfile::default();
        let base = emit_bundle(&generate(&spec).expect("valid"), &profile).expect("emit");

        // One more core is always valid; count bumps only when they keep
        // the chains monotone. Growing the L3 count of a bypass topology is
        // excluded: extra landings re-partition the switch families into
        // smaller per-landing trees, which can legitimately shed lines.
        let mut grown: Vec<TopologySpec> = Vec::new();
        let mut with_core = spec.clone();
        with_core.cores += 1;
        grown.push(with_core);
        for idx in 0..spec.groups.len() {
            if spec.bypass && spec.groups[idx].level == 3 {
                continue;
            }
            let mut bumped = spec.clone();
            bumped.groups[idx] = CacheGroup::new(
                spec.groups[idx].level,
                spec.groups[idx].role,
                spec.groups[idx].count + 1,
            );
            if bumped.validate().is_ok() {
                grown.push(bumped);
            }
        }
        for bigger in grown {
            let bundle = emit_bundle(&generate(&bigger).expect("valid"), &profile).expect("emit");
            prop_assert!(
                bundle.total_loc() >= base.total_loc(),
                "{} -> {} lost lines",
                spec.canonical_name().unwrap(),
                bigger.canonical_name().unwrap()
            );
        }
    }

    #[test]
    fn scalar_rendering_round_trips(value in prop_oneof![
        any::<i64>().prop_map(Scalar::Int),
        (-1e12f64..1e12).prop_map(Scalar::Real),
    ]) {
        let rendered = value.to_string();
        let reparsed = Scalar::parse(&rendered);
        match (&value, &reparsed) {
            (Scalar::Int(a), Scalar::Int(b)) => prop_assert_eq!(a, b),
            // Integral reals re-read as ints; the numeric value is what
            // must survive.
            _ => prop_assert_eq!(value.as_f64(), reparsed.as_f64()),
        }
    }
}
