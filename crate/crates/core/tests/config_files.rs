use std::fs;

use delayrd_core::analysis::analyze;
use delayrd_core::config::parse_config;
use delayrd_core::model::KernelShape;
use delayrd_core::simulator::{run, InitialHistory, RunOptions};
use delayrd_core::Error;

#[test]
fn tables_resolve_relative_to_the_config() {
    let dir = tempfile::tempdir().unwrap();
    let sub = dir.path().join("tables");
    fs::create_dir(&sub).unwrap();
    // Tabulated Nicholson pair, delta = 0.2.
    let mut reaction = String::from("s f g\n");
    for i in 0..=400 {
        let s = i as f64 * 0.02;
        reaction.push_str(&format!("{s} {} {}\n", 0.2 * s, s * (-s).exp()));
    }
    fs::write(sub.join("pair.txt"), reaction).unwrap();
    fs::write(sub.join("kernel.txt"), "a h\n0 1\n0.5 2\n1 1\n").unwrap();
    fs::write(sub.join("init.txt"), "x,u\n0,0.4\n1,0.8\n").unwrap();
    let cfg_path = dir.path().join("run.cfg");
    fs::write(
        &cfg_path,
        "[model]\nkind = custom\ntable = tables/pair.txt\ns_max = 6\n\
         [kernel]\nshape = tabulated\ntable = tables/kernel.txt\ntau = 1\n\
         [grid]\ncells = 10\n[solver]\ndt = 0.05\nt_end = 2\n\
         [init]\nkind = table\nfile = tables/init.txt\n",
    )
    .unwrap();
    let cfg = parse_config(&cfg_path).unwrap();
    assert!(matches!(cfg.kernel.shape(), KernelShape::Tabulated { .. }));
    assert!(matches!(cfg.init, InitialHistory::Table(_)));
    let rp = cfg.reaction_pair().unwrap();
    let a = analyze(&rp, &cfg.analysis).unwrap();
    assert!((a.structure.u_star - 5f64.ln()).abs() < 1e-4);
    let rec = run(
        &rp,
        &cfg.kernel,
        cfg.grid,
        cfg.solver,
        &cfg.init,
        &RunOptions::default(),
    )
    .unwrap();
    assert!((rec.u_min[0] - 0.4).abs() < 1e-12 && (rec.u_max[0] - 0.8).abs() < 1e-12);
}

#[test]
fn bad_table_names_the_config_line() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("k.txt"), "0 1\n1 oops\n").unwrap();
    let cfg_path = dir.path().join("run.cfg");
    fs::write(
        &cfg_path,
        "[model]\nkind = nicholson\ndelta = 0.2\n[kernel]\nshape = tabulated\ntable = k.txt\ntau = 1\n[solver]\ndt = 0.1\nt_end = 1\n",
    )
    .unwrap();
    match parse_config(&cfg_path).unwrap_err() {
        Error::Config { line, key, message, .. } => {
            assert_eq!(line, 6);
            assert_eq!(key, "kernel.table");
            assert!(message.contains("line 2"), "{message}");
        }
        other => panic!("{other:?}"),
    }
    fs::write(
        dir.path().join("run.cfg"),
        "[model]\nkind = custom\ntable = missing.txt\n[kernel]\ntau = 1\n[solver]\ndt = 0.1\nt_end = 1\n",
    )
    .unwrap();
    let e = parse_config(&cfg_path).unwrap_err();
    assert!(e.is_configuration() && e.to_string().contains("missing.txt"), "{e}");
}

#[test]
fn unreadable_config_is_an_io_error() {
    let e = parse_config(std::path::Path::new("/nonexistent/run.cfg")).unwrap_err();
    assert!(matches!(e, Error::Io { .. }));
}
