mod common;

use std::collections::BTreeMap;

use collabnet::{build_network, BuildOptions, CollabNetwork, InstitutionId};
use common::{build_oracle, corpus_strategy, inst_id, CorpusSpec};
use proptest::prelude::*;

fn weights(net: &CollabNetwork) -> BTreeMap<(InstitutionId, InstitutionId), u64> {
    net.edges().map(|(a, b, w)| ((a.clone(), b.clone()), w)).collect()
}

fn oracle_weights(spec: &CorpusSpec) -> BTreeMap<(InstitutionId, InstitutionId), u64> {
    build_oracle(spec).into_iter().map(|((i, j), w)| ((inst_id(i), inst_id(j)), w)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn edges_match_literal_rule(spec in corpus_strategy(10, 8)) {
        let net = build_network(&spec.corpus(), BuildOptions::default());
        prop_assert_eq!(weights(&net), oracle_weights(&spec));
    }

    #[test]
    fn isolates_only_add_nodes(spec in corpus_strategy(10, 8)) {
        let corpus = spec.corpus();
        let with = build_network(&corpus, BuildOptions { with_subjects: false, include_isolates: true });
        let without = build_network(&corpus, BuildOptions::default());
        prop_assert_eq!(weights(&with), weights(&without));
        prop_assert_eq!(with.node_count(), corpus.institutions.len());
        for (id, _) in without.nodes() {
            prop_assert!(without.degree(id) > 0);
        }
    }

    #[test]
    fn subject_breakdown_sums_to_weight_times_subjects(spec in corpus_strategy(8, 8)) {
        // each credited publication adds one to every subject it carries
        let net = build_network(&spec.corpus(), BuildOptions { with_subjects: true, include_isolates: false });
        let mut expected: BTreeMap<(InstitutionId, InstitutionId), u64> = BTreeMap::new();
        for p in &spec.pubs {
            let single = CorpusSpec { categories: spec.categories.clone(), pubs: vec![p.clone()] };
            let distinct = p.subjects.iter().collect::<std::collections::BTreeSet<_>>().len() as u64;
            for (pair, _) in oracle_weights(&single) {
                *expected.entry(pair).or_insert(0) += distinct;
            }
        }
        for (a, b, _) in net.edges() {
            let total: u64 = net.edge_subjects(a, b).map_or(0, |m| m.values().sum());
            prop_assert_eq!(total, expected.get(&(a.clone(), b.clone())).copied().unwrap_or(0));
        }
    }
}

#[test]
fn single_author_with_two_affiliations_is_not_a_collaboration() {
    let spec = CorpusSpec {
        categories: vec![collabnet::Category::Government; 2],
        pubs: vec![common::PubSpec { authors: vec![vec![0, 1]], subjects: vec![] }],
    };
    let net = build_network(&spec.corpus(), BuildOptions::default());
    assert_eq!(net.edge_count(), 0);
    assert_eq!(net.node_count(), 0);
}
