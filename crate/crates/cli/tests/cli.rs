use std::path::PathBuf;
use std::process::{Command, Output};

use tempfile::TempDir;

struct Files(TempDir);

impl Files {
    fn new() -> Self {
        Files(tempfile::tempdir().unwrap())
    }

    fn add(&self, name: &str, text: &str) -> PathBuf {
        let p = self.0.path().join(name);
        std::fs::write(&p, text).unwrap();
        p
    }
}

fn run(args: &[&str], files: &[&PathBuf]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_actorgame"));
    let mut fi = files.iter();
    for a in args {
        if *a == "@" {
            cmd.arg(fi.next().unwrap());
        } else {
            cmd.arg(a);
        }
    }
    cmd.output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn parse_pretty_prints() {
    let f = Files::new();
    let p = f.add("a.ag", "ctx 1.\n  rcv( 1 ) .tick . 0\n");
    let o = run(&["parse", "@"], &[&p]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "ctx 1. rcv(1).tick.0\n");
}

#[test]
fn parse_type_error_points_at_the_channel() {
    let f = Files::new();
    let p = f.add("bad.ag", "ctx 1.\nsnd(2,1).0\n");
    let o = run(&["parse", "@"], &[&p]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains(&format!("{}:2:", p.display())), "{err}");
    assert!(stdout(&o).is_empty());
}

#[test]
fn parse_empty_file_is_an_input_error() {
    let f = Files::new();
    let p = f.add("empty.ag", "");
    let o = run(&["parse", "@"], &[&p]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains(":1:1:"));
}

#[test]
fn missing_file_and_bad_flags_exit_2() {
    let o = run(&["parse", "/nonexistent/x.ag"], &[]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["lts", "x.ag", "--world", "sideways"], &[]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn interp_dumps() {
    let f = Files::new();
    let t = f.add("t.ag", "ctx 1. tick.0");
    let n = f.add("n.ag", "ctx 1. 0");
    let o = run(&["interp", "@"], &[&t]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "strat-v1\n<1> {\n  heart -> [\n    <1> {}\n  ]\n}\n");
    assert_eq!(stdout(&run(&["interp", "@"], &[&n])), "strat-v1\n<1> {}\n");
}

#[test]
fn lts_tick_both_sides() {
    let f = Files::new();
    let t = f.add("t.ag", "ctx 1. tick.0");
    for side in ["process", "strategy"] {
        let o = run(&["lts", "@", "--side", side], &[&t]);
        assert_eq!(o.status.code(), Some(0));
        assert_eq!(stdout(&o), "lts vertices=2 edges=1 root=0\n0 -heart-> 1\n");
    }
}

#[test]
fn lts_fork_sync_tick_chain() {
    let f = Files::new();
    let p = f.add("p.ag", "ctx 0. (snd(1,1).0 | rcv(1).tick.0)");
    let expected = "lts vertices=4 edges=3 root=0\n0 -pi-> 1\n1 -delta-> 2\n2 -heart-> 3\n";
    assert_eq!(stdout(&run(&["lts", "@"], &[&p])), expected);
    assert_eq!(stdout(&run(&["lts", "@", "--side", "strategy"], &[&p])), expected);
}

#[test]
fn lts_interface_shows_inputs() {
    let f = Files::new();
    let p = f.add("p.ag", "ctx 1. rcv(1).0");
    let o = run(&["lts", "@", "--world", "interface"], &[&p]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("in(1)"), "{}", stdout(&o));
}

#[test]
fn fair_single_test() {
    let f = Files::new();
    let subject = f.add("s.ag", "ctx 1. 0");
    let ticker = f.add("t.ag", "ctx 1. tick.0");
    let nil = f.add("n.ag", "ctx 1. 0");
    let o = run(&["fair", "@", "--test", "@"], &[&subject, &ticker]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "test#0 pass\nRESULT pass\n");
    let o = run(&["fair", "@", "--test", "@"], &[&subject, &nil]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout(&o), "test#0 fail witness: (root)\nRESULT fail test#0\n");
}

#[test]
fn fair_rejects_mismatched_map() {
    let f = Files::new();
    let subject = f.add("s.ag", "ctx 2. 0");
    let test = f.add("t.ag", "ctx 1. tick.0");
    let o = run(&["fair", "@", "--test", "@", "--map", "1,3"], &[&subject, &test]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["fair", "@", "--test", "@", "--map", "1,1"], &[&subject, &test]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn fair_suite_is_deterministic_under_seed() {
    let f = Files::new();
    let subject = f.add("s.ag", "ctx 1. 0");
    let a = run(&["fair", "@", "--gen", "1", "--seed", "7"], &[&subject]);
    let b = run(&["fair", "@", "--gen", "1", "--seed", "7"], &[&subject]);
    let plain = run(&["fair", "@", "--gen", "1"], &[&subject]);
    assert_eq!(a.status.code(), Some(1));
    assert_eq!(stdout(&a), stdout(&b));
    // Same verdict lines, possibly reordered, and the same summary.
    let mut x: Vec<_> = stdout(&a).lines().map(String::from).collect();
    let mut y: Vec<_> = stdout(&plain).lines().map(String::from).collect();
    assert_eq!(x.last(), y.last());
    x.sort();
    y.sort();
    assert_eq!(x, y);
}

#[test]
fn eq_distinguishes_tick_from_nil() {
    let f = Files::new();
    let t = f.add("t.ag", "ctx 1. tick.0");
    let n = f.add("n.ag", "ctx 1. 0");
    for bot in ["weak", "strict"] {
        let o = run(&["eq", "@", "@", "--gen", "1", "--bot", bot], &[&t, &n]);
        assert_eq!(o.status.code(), Some(1));
        assert!(stdout(&o).contains("RESULT distinguished test#"), "{}", stdout(&o));
    }
    let o = run(&["eq", "@", "@", "--bisim"], &[&t, &n]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout(&o), "RESULT distinguished trace heart\n");
}

#[test]
fn eq_equivalent_on_both_modes() {
    let f = Files::new();
    let a = f.add("a.ag", "ctx 1. tick.0 + tick.0");
    let b = f.add("b.ag", "ctx 1. tick.0");
    for bot in ["weak", "strict"] {
        let o = run(&["eq", "@", "@", "--gen", "2", "--bot", bot], &[&a, &b]);
        assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
        assert!(stdout(&o).ends_with("RESULT equivalent-on-suite\n"));
    }
    let o = run(&["eq", "@", "@", "--bisim"], &[&a, &b]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "RESULT equivalent\n");
}

#[test]
fn eq_context_mismatch_exits_2() {
    let f = Files::new();
    let a = f.add("a.ag", "ctx 0. 0");
    let b = f.add("b.ag", "ctx 1. 0");
    let o = run(&["eq", "@", "@", "--bisim"], &[&a, &b]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("contexts differ"));
}

#[test]
fn dot_outputs() {
    let f = Files::new();
    let p = f.add("p.ag", "ctx 0. (snd(1,1).0 | rcv(1).tick.0)");
    for what in ["position", "move", "play"] {
        let o = run(&["dot", "@", "--what", what], &[&p]);
        assert_eq!(o.status.code(), Some(0));
        let s = stdout(&o);
        assert!(s.starts_with("digraph"), "{s}");
        assert!(s.trim_end().ends_with('}'));
        assert_eq!(s, stdout(&run(&["dot", "@", "--what", what], &[&p])));
    }
    let o = run(&["dot", "--seed-kind", "heart(1)", "--what", "move"], &[]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("heart(1)"));
    let o = run(&["dot", "--seed-kind", "nonsense"], &[]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn dot_move_on_stuck_process_is_an_error() {
    let f = Files::new();
    let n = f.add("n.ag", "ctx 0. 0");
    let o = run(&["dot", "@", "--what", "move"], &[&n]);
    assert_eq!(o.status.code(), Some(2));
}
