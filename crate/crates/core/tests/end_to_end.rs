use degpack::harness::{
    gen_bounded_graphic_seq, gen_host_min_degree, gen_unbalanced_seq, read_csv, records_from_csv, records_to_csv,
    run_experiment, write_csv, ExperimentConfig, Mode, Outcome, Summary,
};
use degpack::{
    build_bounded_realization, check_embedding, decompose_unbalanced, embed_backtracking, embed_pipeline,
    embed_sequence, embed_with_edits, star_decompose, verify_bounded_structure, DegreeSequence, EmbedOutcome,
    PipelineInput, PipelineParams, SimpleGraph,
};
use degpack::embed::{EditOutcome, SequenceOutcome};

#[test]
fn realization_feeds_the_oracle() {
    let seq = gen_bounded_graphic_seq(16, 3, 2).unwrap();
    let r = build_bounded_realization(&seq).unwrap();
    assert!(verify_bounded_structure(&r, &seq).all_hold());
    let host = gen_host_min_degree(16, 0.7, 2).unwrap();
    match embed_backtracking(&r.graph, &host, 10_000_000) {
        EmbedOutcome::Found(map) => assert!(check_embedding(&r.graph, &host, &map).is_ok()),
        other => panic!("dense host should contain the realization, got {other:?}"),
    }
}

#[test]
fn unbalanced_components_cover_every_label_once() {
    let seq = gen_unbalanced_seq(6, 14, 2, 3, 9).unwrap();
    let list = decompose_unbalanced(&seq, 3).unwrap();
    let mut labels: Vec<usize> = list
        .components
        .iter()
        .flat_map(|c| c.s_labels.iter().chain(&c.t_labels).copied())
        .collect();
    labels.sort_unstable();
    assert_eq!(labels, (0..20).collect::<Vec<_>>());
    assert_eq!(list.union_graph(20).degrees(), seq.to_degree_sequence().degrees());
}

#[test]
fn stars_from_a_generated_host() {
    let g = gen_host_min_degree(60, 0.4, 4).unwrap();
    let dec = star_decompose(&g, 2).unwrap();
    assert!(dec.covers_all() && dec.is_valid_for(&g));
}

#[test]
fn pipeline_maps_pass_the_checker() {
    for seed in 0..10 {
        let host = gen_host_min_degree(30, 0.6, seed).unwrap();
        let seq = gen_bounded_graphic_seq(30, 3, seed + 100).unwrap();
        let params = PipelineParams {
            seed,
            ..PipelineParams::default()
        };
        if let Ok(ok) = embed_pipeline(&host, &PipelineInput::Graphic(seq.clone()), &params) {
            assert_eq!(ok.pattern.degrees(), seq.degrees());
            assert!(check_embedding(&ok.pattern, &host, &ok.map).is_ok());
        }
    }
}

#[test]
fn sequence_search_finds_what_a_fixed_realization_misses() {
    // Two disjoint K4s accept an all-3 sequence only as two K4s, which a
    // Havel-Hakimi realization of (3^8) need not be.
    let host = SimpleGraph::complete(4).disjoint_union(&SimpleGraph::complete(4));
    let seq = DegreeSequence::new(vec![3; 8]);
    assert!(matches!(embed_sequence(&seq, &host, 1_000_000), SequenceOutcome::Found(_)));
    match embed_with_edits(&host, &seq, 0, 1_000_000) {
        EditOutcome::Found { edits, .. } => assert!(edits.is_empty()),
        other => panic!("{other:?}"),
    }
}

#[test]
fn campaign_csv_round_trip() {
    let mut cfg = ExperimentConfig::new(Mode::Thm13, 18, 6, 3);
    cfg.max_degree = 2;
    let records = run_experiment(&cfg).unwrap();
    assert_eq!(records.len(), 6);
    let text = records_to_csv(&records).unwrap();
    assert_eq!(records_from_csv(&text, "mem").unwrap(), records);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.csv");
    write_csv(&path, &records).unwrap();
    assert_eq!(read_csv(&path).unwrap(), records);
    let summary = Summary::of(&cfg, &records);
    assert_eq!(summary.embedded + summary.failed, 6);
    assert_eq!(summary.invalid_maps, 0);
    for r in records.iter().filter(|r| r.outcome == Outcome::Embedded) {
        assert_eq!(r.map_valid, Some(true));
    }
}

#[test]
fn config_survives_toml() {
    let mut cfg = ExperimentConfig::new(Mode::Parity, 10, 4, 8);
    cfg.min_frac = Some(0.5);
    let back = ExperimentConfig::from_toml(&cfg.to_toml(), "mem").unwrap();
    assert_eq!(back, cfg);
    assert!(ExperimentConfig::from_toml("mode = \"thm13\"\nbogus = 1\n", "mem").is_err());
}
