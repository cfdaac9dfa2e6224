use quect::diagnostics::DiagnosticKind;
use quect::ir::Repeat;
use quect::parser::parse_document;
use quect::{bind, Bindings, Chunk, Error, Machine};

const THREE_LINES: &str = "\
QBEGIN
-/n/--|A|----|Uf|---
--------[B]--|Uf|--->
------|A|----------
QEND
";

fn kinds(source: &str) -> Vec<DiagnosticKind> {
    match parse_document(source) {
        Err(Error::Diagnostics(d)) => d.into_iter().map(|d| d.kind).collect(),
        other => panic!("expected diagnostics, got {other:?}"),
    }
}

#[test]
fn golden_ir() {
    let chunk = parse_document(THREE_LINES).unwrap().remove(0);
    let expect = "\
chunk
line 0 repeat n row 2
line 1 repeat 1 row 3
line 2 repeat 1 row 4
stage 0
  gate A lines 0,2 cols 7-9
  gate B lines 1 cols 9-11
stage 1
  gate Uf lines 0,1 cols 14-17
measure 1
end
";
    assert_eq!(chunk.to_canonical_text(), expect);
    assert_eq!(chunk.lines[0].repeat, Repeat::Var("n".into()));
    assert_eq!(Chunk::parse_canonical_text(expect).unwrap(), vec![chunk]);
}

#[test]
fn two_chunks_in_order() {
    let src = "QBEGIN(a)\n--[H]--\nQEND\nint x = 3;\nQBEGIN(b)\n--[X]->\nQEND\n";
    let chunks = parse_document(src).unwrap();
    let names: Vec<_> = chunks.iter().map(|c| c.machine_name.as_deref()).collect();
    assert_eq!(names, [Some("a"), Some("b")]);
}

#[test]
fn rejections() {
    assert!(kinds("QBEGIN\n--|A|----\n---|A|---\nQEND\n").contains(&DiagnosticKind::Alignment));
    assert!(kinds("QBEGIN\n--X--\n-----\nQEND\n").contains(&DiagnosticKind::SwapArity));
    assert!(kinds("QBEGIN\n--X--\n--X--\n--X--\nQEND\n").contains(&DiagnosticKind::SwapArity));
    assert!(kinds("QBEGIN\n-/n/--X--\n------X--\nQEND\n").contains(&DiagnosticKind::RepeatMismatch));
    assert!(kinds("QBEGIN\n--[H]--\n").contains(&DiagnosticKind::UnterminatedChunk));
    assert!(kinds("QEND\n").contains(&DiagnosticKind::StrayDelimiter));
    assert!(kinds("QBEGIN\n-->--\nQEND\n").contains(&DiagnosticKind::MeasureMark));
    assert!(kinds("QBEGIN\n-/0/-[H]-\nQEND\n").contains(&DiagnosticKind::Domain));
}

#[test]
fn diagnostics_carry_document_positions() {
    let src = "// host code\n\nQBEGIN\n--|A|----\n---|A|---\nQEND\n";
    let Err(Error::Diagnostics(d)) = parse_document(src) else { panic!() };
    assert_eq!(d[0].render("f.qct"), "f.qct:5:4: error: ".to_string() + &d[0].message);
}

#[test]
fn pass_through_line_is_untouched() {
    // A two-line CNOT drawn across a middle line that carries |1>.
    let src = "QBEGIN\n|1>--|CX|--\n|1>--------\n|0>--|CX|->\nQEND\n";
    let chunk = parse_document(src).unwrap().remove(0);
    let cx = quect::UnitaryMatrix::from_permutation(vec![0, 1, 3, 2]).unwrap();
    let program = bind(&chunk, &Bindings::new().gate("CX", cx)).unwrap();
    let mut qm = Machine::new(3, 0).unwrap();
    qm.run_chunk(&program).unwrap();
    assert_eq!(qm.state().amplitudes()[0b111].re, 1.0);
    assert_eq!(qm.obs_dist().unwrap(), vec![0.0, 1.0]);
}
