use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const EXAMPLE: &str = "set R = 1..100;
set E = 2..30;
set S = 1..10;
founded int a[R];
founded int b[R];
founded int c[R];
founded int d[R];
founded int y[R];
std bool s1[R];
std bool s2[R];
rule forall (i in E where i mod 2 == 0): a[i] >= b[i - 1] + y[i];
rule forall (i in E where i mod 2 == 0): y[i] >= max(c[2 * i], d[i + 1]);
rule forall (i in S): c[i] >= 10 <- s1[i];
rule forall (i in S): b[i] >= s2[i + 1];
constraint a[2] + a[5] >= 10;
";

fn bfasp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bfasp")).args(args).output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn count(text: &str, prefix: &str) -> usize {
    text.lines().filter(|l| l.starts_with(prefix)).count()
}

fn stat(stderr: &str, key: &str) -> usize {
    let line = stderr.lines().find(|l| l.starts_with(key)).unwrap();
    line.rsplit(' ').next().unwrap().parse().unwrap()
}

#[test]
fn magic_example_emits_four_rules() {
    let dir = tempfile::tempdir().unwrap();
    let model = write(dir.path(), "m.bfasp", EXAMPLE);
    let out = dir.path().join("g.txt");
    let o = bfasp(&["ground", "--mode", "magic", &model, "-o", out.to_str().unwrap(), "--stats"]);
    assert!(o.status.success());
    let text = fs::read_to_string(&out).unwrap();
    let rules: Vec<&str> = text.lines().filter(|l| l.starts_with("rule ")).collect();
    assert_eq!(
        rules,
        [
            "rule a_2 >= sum(b_1, y_2)",
            "rule b_1 >= s2_2",
            "rule c_4 >= 10 <- s1_4",
            "rule y_2 >= max(c_4, -inf)"
        ]
    );
    let err = String::from_utf8(o.stderr).unwrap();
    assert_eq!(stat(&err, "ground rules:"), count(&text, "rule "));
    assert_eq!(stat(&err, "ground constraints:"), count(&text, "constraint "));
    assert_eq!(stat(&err, "ground variables:"), count(&text, "var "));
}

#[test]
fn modes_give_weakly_decreasing_rule_counts() {
    let dir = tempfile::tempdir().unwrap();
    let model = write(dir.path(), "m.bfasp", EXAMPLE);
    let counts: Vec<usize> = ["exhaustive", "bottom-up", "magic"]
        .iter()
        .map(|m| {
            let o = bfasp(&["ground", "--mode", m, &model]);
            assert!(o.status.success());
            count(&String::from_utf8(o.stdout).unwrap(), "rule ")
        })
        .collect();
    assert!(counts[0] >= counts[1] && counts[1] >= counts[2], "{counts:?}");
    assert_eq!(counts[2], 4);
}

#[test]
fn emitting_twice_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let model = write(dir.path(), "m.bfasp", EXAMPLE);
    let a = bfasp(&["ground", "--mode", "bottom-up", &model]).stdout;
    let b = bfasp(&["ground", "--mode", "bottom-up", &model]).stdout;
    assert_eq!(a, b);
}

#[test]
fn invalid_program_exits_four_and_emits_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let model = write(dir.path(), "m.bfasp", "founded int a in 0..3; rule a >= abs(a);");
    let out = dir.path().join("g.txt");
    let o = bfasp(&["ground", "--mode", "magic", &model, "-o", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(4));
    assert!(!out.exists());
}

#[test]
fn error_classes_have_distinct_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.bfasp", "founded int a; rule a >= ;");
    assert_eq!(bfasp(&["check", &bad]).status.code(), Some(2));
    let needs = write(dir.path(), "p.bfasp", "set S = 1..2; param int w[S]; founded int a; rule a >= w[1];");
    assert_eq!(bfasp(&["check", &needs]).status.code(), Some(3));
    let data = write(dir.path(), "d.json", "{\"w\": [1, 2]}");
    assert_eq!(bfasp(&["check", &needs, &data]).status.code(), Some(0));
    let unsupported = write(dir.path(), "u.bfasp", "founded int a in 0..3; founded int b in 0..3; rule a >= abs(b);");
    assert_eq!(bfasp(&["ground", &unsupported]).status.code(), Some(5));
    let big = write(dir.path(), "g.txt", "var std int x lb=0 ub=999\nvar std int y lb=0 ub=999\n");
    assert_eq!(bfasp(&["solve-oracle", &big, "--cap", "1000"]).status.code(), Some(6));
    assert_eq!(bfasp(&["solve-oracle", &bad]).status.code(), Some(2));
}

#[test]
fn check_prints_component_report() {
    let dir = tempfile::tempdir().unwrap();
    let model = write(dir.path(), "m.bfasp", "founded bool p; founded bool q; rule p <- not q; rule q <- not p;");
    let o = bfasp(&["check", &model]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("recursive unstratified"), "{text}");
    assert!(text.contains("valid: 2 arrays, 2 rules"), "{text}");
}

#[test]
fn oracle_reads_emitted_programs() {
    let dir = tempfile::tempdir().unwrap();
    let model = write(dir.path(), "m.bfasp", "founded bool p; founded bool q; rule p <- not q; rule q <- not p;");
    let g = bfasp(&["ground", "--mode", "bottom-up", &model]).stdout;
    let gp = write(dir.path(), "g.txt", &String::from_utf8(g).unwrap());
    let o = bfasp(&["solve-oracle", &gp]);
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text, "SOLUTIONS 2\np=false q=true\np=true q=false\n");
    let unsat = write(dir.path(), "u.txt", "var founded bool p lb=false ub=true\nrule p >= not(p)\n");
    assert_eq!(String::from_utf8(bfasp(&["solve-oracle", &unsat]).stdout).unwrap(), "UNSATISFIABLE\n");
}

#[test]
fn generated_instance_round_trips_through_the_tool() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("inst");
    let o = bfasp(&["gen", "roadcon", "--nodes", "5", "--edges", "6", "--seed", "3", "-o", inst.to_str().unwrap()]);
    assert!(o.status.success());
    let again = dir.path().join("again");
    bfasp(&["gen", "roadcon", "--nodes", "5", "--edges", "6", "--seed", "3", "-o", again.to_str().unwrap()]);
    assert_eq!(fs::read(inst.join("data.json")).unwrap(), fs::read(again.join("data.json")).unwrap());
    let g = dir.path().join("g.txt");
    let m = inst.join("model.bfasp");
    let d = inst.join("data.json");
    assert!(bfasp(&["ground", m.to_str().unwrap(), d.to_str().unwrap(), "-o", g.to_str().unwrap()]).status.success());
    let o = bfasp(&["solve-oracle", g.to_str().unwrap(), "--minimize"]);
    assert!(String::from_utf8(o.stdout).unwrap().starts_with("OPTIMUM "));
    let bad = bfasp(&["gen", "companycon", "--companies", "3", "--relevant", "9", "-o", inst.to_str().unwrap()]);
    assert_eq!(bad.status.code(), Some(2));
}
