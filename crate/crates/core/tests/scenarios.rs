use uncertainty_lab::harness::{
    corpus, parse_scenario, run_corpus, run_scenario, DirectiveKind, Format, HarnessError,
    LineKind, RunOptions,
};

fn bundled(name: &str) -> &'static str {
    corpus()
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, t)| *t)
        .unwrap_or_else(|| panic!("{name} is not bundled"))
}

fn run_lines(name: &str, opts: &RunOptions) -> String {
    let s = parse_scenario(name, &format!("{name}.scn"), bundled(name)).unwrap();
    run_scenario(&s, opts).unwrap().emit(Format::Lines)
}

#[test]
fn corpus_has_every_required_scenario() {
    let names: Vec<&str> = corpus().iter().map(|(n, _)| *n).collect();
    for want in [
        "mycin_flu",
        "conjunction_implicit",
        "categorical_query",
        "quentin_split",
        "maria_planets",
        "sarcasm_reviews",
        "bears_mammals",
        "per_class_confidence",
        "threshold_consumer",
        "learning_loop",
        "composite_priority",
        "rain_overconfidence",
    ] {
        assert!(names.contains(&want), "{want} missing");
    }
    let mut sorted = names.clone();
    sorted.sort();
    assert_eq!(names, sorted);
}

#[test]
fn every_bundled_expectation_passes() {
    for (name, res) in run_corpus(&RunOptions::default()) {
        let r = res.unwrap_or_else(|e| panic!("{name}: {e}"));
        assert!(r.passed(), "{name}: {:?}", r.failures);
        assert!(r.expectations_passed > 0, "{name} checks nothing");
    }
}

#[test]
fn mycin_loads_one_symbolic_system_and_two_queries() {
    let s = parse_scenario("mycin_flu", "mycin_flu.scn", bundled("mycin_flu")).unwrap();
    assert_eq!(s.systems.len(), 1);
    assert!(s.systems[0].members[0].as_symbolic().is_some());
    let queries = s
        .directives
        .iter()
        .filter(|d| matches!(d.kind, DirectiveKind::Query { .. }))
        .count();
    assert_eq!(queries, 2);
}

#[test]
fn quentin_loads_one_composition_one_observe_one_ascribe() {
    let s = parse_scenario("quentin_split", "q.scn", bundled("quentin_split")).unwrap();
    assert_eq!(s.systems.len(), 1);
    let count = |f: fn(&DirectiveKind) -> bool| s.directives.iter().filter(|d| f(&d.kind)).count();
    assert_eq!(
        count(|k| matches!(
            k,
            DirectiveKind::ObserveAssert { .. } | DirectiveKind::ObserveInput { .. }
        )),
        1
    );
    assert_eq!(count(|k| matches!(k, DirectiveKind::Ascribe { .. })), 1);
}

#[test]
fn empty_file_declares_no_systems() {
    let e = parse_scenario("empty", "empty.scn", "").unwrap_err();
    assert_eq!(
        e,
        HarnessError::Syntax {
            file: "empty.scn".into(),
            line: 1,
            message: "no systems declared".into()
        }
    );
    assert!(e.is_load_error());
}

#[test]
fn unknown_system_is_a_load_error() {
    let e = parse_scenario("u", "u.scn", "system a kind=symbolic\nend\nquery b ? p\n").unwrap_err();
    assert!(
        matches!(e, HarnessError::UnknownSystem { line: 3, .. }),
        "{e}"
    );
}

#[test]
fn dimension_mismatch_is_caught_at_load() {
    let text = "system n kind=network\n  layers 2 1\n  weights 1 1 1 1\nend\n";
    let e = parse_scenario("d", "d.scn", text).unwrap_err();
    assert!(e.is_load_error(), "{e}");
}

#[test]
fn systems_only_scenario_is_empty_and_passes() {
    let s = parse_scenario(
        "s",
        "s.scn",
        "system a kind=symbolic\n  cred p = 0.5\nend\n",
    )
    .unwrap();
    let r = run_scenario(&s, &RunOptions::default()).unwrap();
    assert!(r.passed());
    assert!(r.lines.is_empty());
    assert_eq!(r.emit(Format::Lines), "");
}

#[test]
fn failed_expectation_lists_actual_lines() {
    let text = "system a kind=symbolic\n  cred p = 0.5\nend\nquery a ? p\nexpect cred p = 0.6000\n";
    let s = parse_scenario("f", "f.scn", text).unwrap();
    let r = run_scenario(&s, &RunOptions::default()).unwrap();
    assert!(!r.passed());
    assert_eq!(r.failures[0].line, 5);
    assert!(r.failures[0]
        .actual
        .contains(&"cred p = 0.5000".to_string()));
}

#[test]
fn report_examples() {
    let opts = RunOptions::default();
    let conj = run_lines("conjunction_implicit", &opts);
    assert!(conj.contains("cred (p & q) = 0.7200"));
    let rain = run_lines("rain_overconfidence", &opts);
    assert!(rain.contains("FLAG rain_net overconfident evidence=0.7000 verdict=true\n"));
    let maria = run_lines("maria_planets", &opts);
    assert!(maria.contains("VERDICT maria ?x open: largest_planet(x) epistemic=yes subjective=yes kind=cat mode=explicit"));
    let comp = run_lines("composite_priority", &opts);
    assert!(comp.contains("VERDICT confident_first ? p epistemic=no subjective=no"));
}

#[test]
fn lines_format_keeps_only_machine_lines() {
    let out = run_lines("bears_mammals", &RunOptions::default());
    for l in out.lines() {
        assert!(
            ["UTTER ", "VERDICT ", "FLAG ", "EXPECT "]
                .iter()
                .any(|p| l.starts_with(p)),
            "{l}"
        );
    }
}

#[test]
fn text_format_has_sections() {
    let s = parse_scenario("rain", "rain.scn", bundled("rain_overconfidence")).unwrap();
    let r = run_scenario(&s, &RunOptions::default()).unwrap();
    let text = r.emit(Format::Text);
    for section in [
        "== transcript ==",
        "== verdicts ==",
        "== flags ==",
        "== expectations ==",
    ] {
        assert!(text.contains(section), "{section}");
    }
    assert_eq!(r.lines_of(LineKind::Flag).count(), 2);
}

#[test]
fn runs_are_deterministic() {
    let opts = RunOptions::default();
    for (name, _) in corpus() {
        assert_eq!(run_lines(name, &opts), run_lines(name, &opts), "{name}");
    }
}

#[test]
fn parallel_corpus_matches_sequential_runs() {
    let opts = RunOptions::default();
    for (name, res) in run_corpus(&opts) {
        assert_eq!(
            res.unwrap().emit(Format::Lines),
            run_lines(name, &opts),
            "{name}"
        );
    }
}

#[test]
fn assert_threshold_flag_reaches_unset_policies_only() {
    let text = "system a kind=symbolic\n  cred p = 0.8\nend\nobserve a assert p\n";
    let s = parse_scenario("t", "t.scn", text).unwrap();
    let low = RunOptions {
        assert_threshold: Some(0.7),
        ..RunOptions::default()
    };
    assert!(run_scenario(&s, &low).unwrap().contains("UTTER a ASSERT p"));
    assert!(run_scenario(&s, &RunOptions::default())
        .unwrap()
        .contains("UTTER a ASSERT p @ 0.8000"));
    let pinned = "system a kind=symbolic\n  cred p = 0.8\n  policy assert_threshold = 0.95\nend\nobserve a assert p\n";
    let s = parse_scenario("t", "t.scn", pinned).unwrap();
    assert!(run_scenario(&s, &low)
        .unwrap()
        .contains("UTTER a ASSERT p @ 0.8000"));
}

#[test]
fn depth_limit_flag_surfaces_as_runtime_error() {
    let mut text = String::from("system a kind=symbolic\n  fact r0(a)\n");
    for i in 0..10 {
        text.push_str(&format!("  rule r{i}(x) -> r{}(x)\n", i + 1));
    }
    text.push_str("end\nquery a ? r10(a)\n");
    let s = parse_scenario("d", "d.scn", &text).unwrap();
    assert!(run_scenario(&s, &RunOptions::default())
        .unwrap()
        .contains("answer ? r10(a) = yes"));
    let tight = RunOptions {
        depth_limit: Some(3),
        ..RunOptions::default()
    };
    let e = run_scenario(&s, &tight).unwrap_err();
    assert!(matches!(e, HarnessError::Runtime { line: 14, .. }), "{e}");
}
