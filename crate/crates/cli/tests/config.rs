use nltrace_cli::config::{parse, Experiment};

#[test]
fn every_experiment_resolves_from_its_name_alone() {
    for e in Experiment::ALL {
        if e == Experiment::ConvergenceStudy {
            let err = parse("experiment = \"convergence_study\"\n", "x.toml").unwrap_err();
            assert!(err.message.contains("needs [study] experiment"));
            continue;
        }
        let text = format!("experiment = \"{}\"\n", e.name());
        let (cfg, _) = parse(&text, "x.toml").unwrap_or_else(|err| panic!("{}: {err}", e.name()));
        assert_eq!(cfg.experiment, e);
        assert!(cfg.params.s.is_some() && cfg.params.p.is_some() && cfg.params.theta.is_some());
        assert!(cfg.output.dir.is_some());
    }
}

#[test]
fn resolved_config_round_trips() {
    for name in ["verify_hardy_strip", "solve_obstacle", "verify_multiplier"] {
        let (cfg, _) = parse(&format!("experiment = \"{name}\"\nseed = 12\n"), "x.toml").unwrap();
        let echoed = cfg.to_toml();
        let (again, _) = parse(&echoed, "echo.toml").unwrap();
        assert_eq!(again.to_toml(), echoed, "{name}");
    }
}

#[test]
fn syntax_errors_carry_a_line() {
    let err = parse("experiment = \"verify_elementary\"\nseed = \n", "s.toml").unwrap_err();
    assert_eq!(err.line, Some(2));
    assert!(err.to_string().starts_with("s.toml:2: "));
}

#[test]
fn semantic_errors_point_at_the_offending_key() {
    let text = "experiment = \"solve_obstacle\"\n\n[solver]\ntol = 1e-9\nmethod = \"newton\"\n";
    let err = parse(text, "m.toml").unwrap_err();
    assert_eq!(err.line, Some(5));
    assert!(err.message.contains("unknown solver 'newton'"));

    let text = "experiment = \"verify_hardy_strip\"\n[family]\nfunctions = [\"coord(1)\", \"wiggle(2)\"]\n";
    let err = parse(text, "f.toml").unwrap_err();
    assert_eq!(err.line, Some(3));
}

#[test]
fn hardy_experiments_reject_subcritical_exponents() {
    let text = "experiment = \"verify_trace_strip\"\n[params]\ns = 0.5\np = 1.5\n";
    let err = parse(text, "t.toml").unwrap_err();
    assert_eq!(err.to_string(), "t.toml:3: trace_strip requires sp > 1; got sp = 0.75");
    let ok = "experiment = \"verify_elementary\"\n[params]\ns = 0.5\np = 1.5\n";
    assert!(parse(ok, "e.toml").is_ok());
}
