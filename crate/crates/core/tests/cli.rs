use std::io::Write;
use std::process::{Command, Stdio};

use vcmatch::cli::{run, EXIT_INVALID, EXIT_OK};

fn invoke(args: &[&str], stdin: &[u8]) -> (i32, String, String) {
    let mut input = stdin;
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("vcmatch").chain(args.iter().copied());
    let code = run(argv, &mut input, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn find_pvc_lines() {
    let (code, out, _) = invoke(
        &["find", "--pattern", "ABAb", "--text-inline", "ababbbb", "--mode", "pvc", "--algo", "kmp"],
        b"",
    );
    assert_eq!(code, EXIT_OK);
    assert_eq!(out, "1\n2\n");
}

#[test]
fn find_all_backends() {
    let (code, out, err) = invoke(
        &["find", "--pattern", "ABAb", "--text-inline", "ababbbb", "--mode", "fvc", "--algo", "all"],
        b"",
    );
    assert_eq!(code, EXIT_OK, "{err}");
    assert_eq!(out, "1\n2\n4\n");

    let (code, out, _) = invoke(
        &["find", "--pattern", "AABaaCbC", "--text-inline", "bbaaaabbb", "--algo", "all"],
        b"",
    );
    assert_eq!(code, EXIT_OK);
    assert_eq!(out, "");
}

#[test]
fn json_matches_lines() {
    for algo in ["naive", "conv", "kmp", "all"] {
        let (code, out, _) = invoke(
            &["find", "--pattern", "ABAb", "--text-inline", "ababbbb", "--algo", algo, "--json"],
            b"",
        );
        assert_eq!(code, EXIT_OK);
        let doc: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(doc["positions"], serde_json::json!([1, 2, 4]));
        assert_eq!(doc["count"], 3);
        assert_eq!(doc["algo"], algo);
        assert_eq!(doc["mode"], "fvc");
        assert_eq!(doc["m"], 4);
        assert_eq!(doc["n"], 7);
        assert!(doc["timings"]["preprocess_ns"].is_u64());
        assert!(doc["timings"]["query_ns"].is_u64());
        assert_eq!(doc.get("agree").is_some(), algo == "all");
    }
}

#[test]
fn witnesses_in_both_formats() {
    let args = ["find", "--pattern", "ABAb", "--text-inline", "ababbbb", "--witness"];
    let (_, out, _) = invoke(&args, b"");
    assert_eq!(out, "1\tA=a B=b\n2\tA=b B=a\n4\tA=b B=b\n");

    let (_, out, _) = invoke(&[&args[..], &["--json", "--mode", "pvc"]].concat(), b"");
    let doc: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(doc["witnesses"]["2"], serde_json::json!({"A": "b", "B": "a"}));
    assert!(doc["witnesses"].get("4").is_none());
}

#[test]
fn text_from_stdin_and_files() {
    let (code, out, _) = invoke(&["find", "--pattern", "ABAb", "--mode", "pvc"], b"ababbbb");
    assert_eq!(code, EXIT_OK);
    assert_eq!(out, "1\n2\n");

    let dir = std::env::temp_dir().join(format!("vcmatch-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let pattern = dir.join("pattern.txt");
    let text = dir.join("text.txt");
    std::fs::write(&pattern, "ABAb\n").unwrap();
    std::fs::write(&text, "ababbbb").unwrap();
    let (code, out, _) = invoke(
        &[
            "find",
            "--pattern-file",
            pattern.to_str().unwrap(),
            "--text-file",
            text.to_str().unwrap(),
        ],
        b"",
    );
    assert_eq!(code, EXIT_OK);
    assert_eq!(out, "1\n2\n4\n");

    let (code, _, err) = invoke(
        &["find", "--pattern", "A", "--text-file", dir.join("missing").to_str().unwrap()],
        b"",
    );
    assert_eq!(code, EXIT_INVALID);
    assert!(err.contains("missing"));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn custom_variable_charset() {
    let (_, out, _) = invoke(
        &["find", "--pattern", "xyx", "--variables", "xy", "--text-inline", "abaXYX", "--mode", "pvc"],
        b"",
    );
    assert_eq!(out, "1\n4\n");
}

#[test]
fn text_bytes_in_charset_are_constants() {
    let (_, out, _) = invoke(&["find", "--pattern", "aB", "--text-inline", "aAaa"], b"");
    assert_eq!(out, "1\n3\n");
}

#[test]
fn invalid_inputs() {
    let (code, _, _) = invoke(&["find", "--pattern", "", "--text-inline", "ab"], b"");
    assert_eq!(code, EXIT_INVALID);
    let (code, _, _) = invoke(&["find", "--text-inline", "ab"], b"");
    assert_eq!(code, EXIT_INVALID);
    let (code, _, _) = invoke(&["find", "--pattern", "A", "--mode", "xyz"], b"");
    assert_eq!(code, EXIT_INVALID);
    let (code, _, _) = invoke(&["find", "--pattern", "A", "--chunk-width", "12"], b"");
    assert_eq!(code, EXIT_INVALID);
    let (code, _, _) = invoke(&["bench", "--algos", "fft", "--sizes", "16"], b"");
    assert_eq!(code, EXIT_INVALID);
}

#[test]
fn chunk_widths_agree() {
    for w in ["8", "16", "32", "64"] {
        let (_, out, _) = invoke(
            &["find", "--pattern", "AABaaCbC", "--text-inline", "aabaacbcbbaabbabab", "--chunk-width", w],
            b"",
        );
        assert_eq!(out, "1\n");
    }
}

#[test]
fn crosscheck_passes() {
    let (code, out, _) = invoke(&["crosscheck", "--seed", "1", "--cases", "1000"], b"");
    assert_eq!(code, EXIT_OK);
    assert_eq!(out, "1000/1000 agree\n");

    let (code, out, _) = invoke(&["crosscheck", "--cases", "0"], b"");
    assert_eq!(code, EXIT_OK);
    assert_eq!(out, "0/0 agree\n");

    let (code, out, _) = invoke(
        &["crosscheck", "--seed", "9", "--cases", "500", "--adversarial", "--chunk-width", "8"],
        b"",
    );
    assert_eq!(code, EXIT_OK);
    assert_eq!(out, "500/500 agree\n");
}

#[test]
fn crosscheck_is_deterministic() {
    let a = invoke(&["crosscheck", "--seed", "4", "--cases", "50", "--adversarial"], b"");
    let b = invoke(&["crosscheck", "--seed", "4", "--cases", "50", "--adversarial"], b"");
    assert_eq!(a, b);
}

#[test]
fn bench_emits_grid() {
    let (code, out, _) = invoke(&["bench", "--m", "16", "--sizes", "256,512,1024", "--reps", "1"], b"");
    assert_eq!(code, EXIT_OK);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "algo,mode,m,n,vars,consts,preprocess_ns,query_ns");
    assert!(lines.len() > 9);
    for row in &lines[1..] {
        let cols: Vec<&str> = row.split(',').collect();
        assert_eq!(cols.len(), 8);
        assert_eq!(cols[2], "16");
        assert!(cols[6].parse::<u128>().is_ok() && cols[7].parse::<u128>().is_ok());
    }
}

#[test]
fn binary_exit_codes() {
    let exe = env!("CARGO_BIN_EXE_vcmatch");
    let mut child = Command::new(exe)
        .args(["find", "--pattern", "ABAb", "--json"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(b"ababbbb").unwrap();
    let output = child.wait_with_output().unwrap();
    assert!(output.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&output.stdout).unwrap();
    assert_eq!(doc["positions"], serde_json::json!([1, 2, 4]));

    let status = Command::new(exe)
        .args(["find", "--pattern", "", "--text-inline", "a"])
        .stderr(Stdio::null())
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
}
