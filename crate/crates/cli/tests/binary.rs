use std::process::Command;

#[allow(dead_code)]
mod common;

fn run_bin(name: &str) -> (String, String, i32) {
    let path = common::golden_dir().join(name);
    let out = Command::new(env!("CARGO_BIN_EXE_gmact")).arg(path).output().unwrap();
    (
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
        out.status.code().unwrap(),
    )
}

#[test]
fn exit_codes_and_channels() {
    let (out, err, code) = run_bin("01_detect_euler.gmact");
    assert_eq!(code, 0);
    assert!(out.starts_with("SEMISIMPLE order=16 action { x -> t^2*x; y -> t^3*y; }\n"));
    assert!(err.is_empty());

    let (out, _, code) = run_bin("02_detect_translation.gmact");
    assert_eq!((out.as_str(), code), ("NOT_CERTIFIED order=16 generator=x\n", 2));

    let (out, err, code) = run_bin("19_syntax_error.gmact");
    assert_eq!(code, 1);
    assert!(out.is_empty());
    assert_eq!(err, "error: 2:14: expected expression, found `;`\n");
}

#[test]
fn missing_file_is_an_error() {
    let (_, err, code) = run_bin("no_such_session.gmact");
    assert_eq!(code, 1);
    assert!(err.starts_with("error: "));
}
