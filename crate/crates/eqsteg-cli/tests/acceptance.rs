//! Drives the built binary end to end: pipe round trips, exit codes, golden
//! outputs, and the keymap file workflow.

use std::io::Write;
use std::process::{Command, Output, Stdio};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn run(args: &[&str], stdin: Option<&str>) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_eqsteg"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("spawn eqsteg");
    if let Some(text) = stdin {
        child
            .stdin
            .as_mut()
            .expect("stdin piped")
            .write_all(text.as_bytes())
            .expect("write stdin");
    }
    drop(child.stdin.take());
    child.wait_with_output().expect("wait for eqsteg")
}

fn stdout_of(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).expect("utf-8 stdout")
}

fn stderr_of(output: &Output) -> String {
    String::from_utf8(output.stderr.clone()).expect("utf-8 stderr")
}

fn charset() -> Vec<char> {
    let mut symbols: Vec<char> = ('A'..='Z').chain('a'..='z').chain('0'..='9').collect();
    symbols.push(' ');
    symbols
}

#[test]
fn encode_with_empty_message_prints_the_bare_cover_text() {
    let output = run(
        &[
            "encode",
            "--keymap",
            "default",
            "--id",
            "2",
            "--seed",
            "7",
            "--message",
            "",
        ],
        None,
    );
    assert!(output.status.success());
    assert_eq!(stdout_of(&output), "Math Quiz (2 Pts) Answer: \n");
}

#[test]
fn decode_recovers_known_stego_texts() {
    let output = run(
        &["decode", "--keymap", "default"],
        Some("Math Quiz (2 Pts) Answer: 82="),
    );
    assert!(output.status.success());
    assert_eq!(stdout_of(&output), "A\n");

    let output = run(
        &["decode", "--keymap", "default"],
        Some("Math Quiz (2 Pts) Answer: 63%51-220^201^107*115*237^92*119*130=\n"),
    );
    assert!(output.status.success());
    assert_eq!(stdout_of(&output), "Attack Now\n");
}

#[test]
fn decode_rejects_garbage_with_exit_1() {
    let output = run(&["decode", "--keymap", "default"], Some("hello"));
    assert_eq!(output.status.code(), Some(1));
    assert!(stderr_of(&output).contains("malformed stego"));
    assert!(output.stdout.is_empty());
}

#[test]
fn pipe_round_trip_reproduces_a_hundred_messages() {
    let symbols = charset();
    let mut rng = ChaCha8Rng::seed_from_u64(0xC11);

    for round in 0..100u64 {
        let len = rng.gen_range(0..=20);
        let message: String = (0..len)
            .map(|_| symbols[rng.gen_range(0..symbols.len())])
            .collect();
        let seed = round.to_string();

        let encoded = if round % 2 == 0 {
            run(
                &[
                    "encode",
                    "--id",
                    "2",
                    "--seed",
                    &seed,
                    "--message",
                    &message,
                ],
                None,
            )
        } else {
            // exercise the stdin path as well
            run(&["encode", "--id", "2", "--seed", &seed], Some(&message))
        };
        assert!(
            encoded.status.success(),
            "encode failed: {}",
            stderr_of(&encoded)
        );
        let stego = stdout_of(&encoded);
        assert!(stego.ends_with('\n'));
        assert!(stego.trim_end_matches('\n').chars().count() <= 140);

        // feed encode's stdout straight into decode, newline included
        let decoded = run(&["decode", "--keymap", "default"], Some(&stego));
        assert!(
            decoded.status.success(),
            "decode failed: {}",
            stderr_of(&decoded)
        );
        assert_eq!(stdout_of(&decoded), format!("{message}\n"), "round {round}");
    }
}

#[test]
fn decoding_under_the_wrong_keymap_id_names_the_unknown_id() {
    let encoded = run(
        &["encode", "--id", "9", "--seed", "1", "--message", "A"],
        None,
    );
    assert!(encoded.status.success());

    let decoded = run(
        &["decode", "--keymap", "default", "--id", "2"],
        Some(&stdout_of(&encoded)),
    );
    assert_eq!(decoded.status.code(), Some(1));
    assert!(stderr_of(&decoded).contains("unknown key map"));
}

#[test]
fn encode_is_deterministic_for_fixed_flags() {
    let args = [
        "encode",
        "--id",
        "2",
        "--seed",
        "31337",
        "--message",
        "High Five",
    ];
    let first = run(&args, None);
    let second = run(&args, None);
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn keygen_exports_the_builtin_tables_verbatim() {
    let golden = include_str!("../../eqsteg/tests/golden/default-keymap-2.txt");
    let output = run(&["keygen", "--id", "2", "--default"], None);
    assert!(output.status.success());
    assert_eq!(stdout_of(&output), golden);
}

#[test]
fn keymap_file_workflow_round_trips() {
    let path =
        std::env::temp_dir().join(format!("eqsteg-acceptance-{}.keymap", std::process::id()));
    let path_str = path.to_str().unwrap();

    let keygen = run(
        &["keygen", "--id", "7", "--seed", "42", "--output", path_str],
        None,
    );
    assert!(keygen.status.success(), "{}", stderr_of(&keygen));

    let encoded = run(
        &[
            "encode",
            "--keymap",
            path_str,
            "--seed",
            "5",
            "--message",
            "Attack now",
        ],
        None,
    );
    assert!(encoded.status.success(), "{}", stderr_of(&encoded));
    let stego = stdout_of(&encoded);
    assert!(stego.starts_with("Math Quiz (7 Pts) Answer: "));

    let decoded = run(&["decode", "--keymap", path_str], Some(&stego));
    assert!(decoded.status.success(), "{}", stderr_of(&decoded));
    assert_eq!(stdout_of(&decoded), "Attack now\n");

    std::fs::remove_file(&path).ok();
}

#[test]
fn capacity_report_lists_the_bounds() {
    let output = run(
        &[
            "capacity",
            "--id",
            "2",
            "--message",
            "Sunway",
            "--seed",
            "3",
        ],
        None,
    );
    assert!(output.status.success());
    let report = stdout_of(&output);
    assert!(report.contains("message length: 6"));
    assert!(report.contains("prefix length: 26"));
    assert!(report.contains("min total: 45"));
    assert!(report.contains("max total: 50"));
    assert!(report.contains("actual total: "));
    assert!(report.contains("max message length (optimistic): 56"));
    assert!(report.contains("max message length (pessimistic): 28"));
    assert!(report.ends_with('\n'));
    assert!(!report.ends_with("\n\n"));
}

#[test]
fn lint_reads_stego_text_and_bare_equations() {
    let output = run(
        &["lint"],
        Some("Math Quiz (2 Pts) Answer: 63%51-220^201^107*115*237^92*119*130="),
    );
    assert!(output.status.success());
    assert!(stdout_of(&output).contains("large-exponent"));

    let output = run(&["lint", "--equation", "2+3="], None);
    assert!(output.status.success());
    assert_eq!(stdout_of(&output), "no findings\n");
}

#[test]
fn usage_errors_exit_with_2() {
    let output = run(&["encode", "--message", "A"], None);
    assert_eq!(output.status.code(), Some(2));
    assert!(stderr_of(&output).contains("--id"));

    let output = run(&["keygen", "--id", "3"], None);
    assert_eq!(output.status.code(), Some(2));

    let output = run(&["frobnicate"], None);
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn weight_flags_steer_operator_choice() {
    // all weight on "+": every operator except the final "=" must be "+"
    let output = run(
        &[
            "encode",
            "--id",
            "2",
            "--seed",
            "4",
            "--message",
            "Attack now",
            "--weights",
            "^:0,-:0,*:0,/:0,%:0,+:1",
        ],
        None,
    );
    assert!(output.status.success(), "{}", stderr_of(&output));
    let stego = stdout_of(&output);
    let equation = stego
        .trim_end()
        .strip_prefix("Math Quiz (2 Pts) Answer: ")
        .unwrap();
    let ops: String = equation.chars().filter(|c| !c.is_ascii_digit()).collect();
    assert_eq!(ops, "+++++++++=");

    let output = run(
        &[
            "encode",
            "--id",
            "2",
            "--seed",
            "4",
            "--message",
            "A",
            "--weights",
            "=:1",
        ],
        None,
    );
    assert_eq!(output.status.code(), Some(2));
}
