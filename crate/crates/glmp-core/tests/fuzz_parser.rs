//! Mutation fuzzing of the parser: no input may panic or hang.

use std::path::PathBuf;
use std::time::{Duration, Instant};

use glmp_core::dsl::{parse_model, ModelSource};

/// Small deterministic PRNG (xorshift64*), so the corpus is reproducible.
struct Rng(u64);

impl Rng {
    fn next(&mut self) -> u64 {
        let mut x = self.0;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        self.0 = x;
        x.wrapping_mul(0x2545F4914F6CDD1D)
    }

    fn below(&mut self, n: usize) -> usize {
        (self.next() % n as u64) as usize
    }
}

fn mutate(rng: &mut Rng, base: &[u8]) -> Vec<u8> {
    let mut bytes = base.to_vec();
    match rng.below(6) {
        // byte flips
        0 => {
            for _ in 0..1 + rng.below(64) {
                let i = rng.below(bytes.len());
                bytes[i] = (rng.next() & 0xff) as u8;
            }
        }
        // truncation
        1 => bytes.truncate(rng.below(bytes.len())),
        // splice a random slice over another position
        2 => {
            let from = rng.below(bytes.len());
            let len = rng.below(bytes.len() - from).min(512);
            let to = rng.below(bytes.len());
            let slice: Vec<u8> = bytes[from..from + len].to_vec();
            let end = (to + len).min(bytes.len());
            bytes.splice(to..end, slice);
        }
        // delete a chunk
        3 => {
            let from = rng.below(bytes.len());
            let len = rng.below(bytes.len() - from).min(256);
            bytes.drain(from..from + len);
        }
        // inject structural noise where it hurts
        4 => {
            let noise: &[&[u8]] = &[
                b"{", b"}", b"(", b")", b";", b"\"", b"if", b"then", b"using",
                b"rules", b"weights", b"-", b"1e999", b"\\", b"\x00", b"\xff\xfe",
            ];
            for _ in 0..1 + rng.below(16) {
                let i = rng.below(bytes.len());
                let n = noise[rng.below(noise.len())];
                bytes.splice(i..i, n.iter().copied());
            }
        }
        // duplicate the document onto itself
        _ => {
            let copy = bytes.clone();
            let i = rng.below(bytes.len());
            bytes.splice(i..i, copy);
        }
    }
    bytes
}

#[test]
fn one_megabyte_of_mutants_never_panics_or_hangs() {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/softskills.glmp");
    let base = std::fs::read(&path).unwrap();
    let mut rng = Rng(0x5eed_2024_0612_cafe);
    let mut fuzzed_bytes = 0usize;
    let mut cases = 0usize;
    while fuzzed_bytes < 1 << 20 {
        let mutant = mutate(&mut rng, &base);
        fuzzed_bytes += mutant.len();
        cases += 1;
        // invalid UTF-8 is the caller's problem; parse what decodes
        let text = String::from_utf8_lossy(&mutant);
        let started = Instant::now();
        let outcome = parse_model(&ModelSource::inline(&text));
        assert!(
            started.elapsed() < Duration::from_secs(2),
            "case {cases}: parser took {:?}",
            started.elapsed()
        );
        // a returned model must have survived validation
        if let Some(ref model) = outcome.model {
            assert!(!outcome.has_errors());
            assert!(!model.skills.is_empty());
        }
    }
    assert!(cases >= 50, "corpus too small: {cases} cases");
}

#[test]
fn pathological_inputs_parse_without_panic() {
    let cases: &[&str] = &[
        "",
        "{{{{{{{{",
        "\"",
        "measure",
        "skill s from",
        &"(".repeat(10_000),
        &"if ".repeat(10_000),
        "measure \u{1F600} unit \"\u{0000}\" range -0.0 NaN source text",
        "variable v labels a b partition (1,2",
        &format!("skill s from m using rules {{ {} }}", "if m is low then low;".repeat(2_000)),
    ];
    for case in cases {
        let _ = parse_model(&ModelSource::inline(case));
    }
}
