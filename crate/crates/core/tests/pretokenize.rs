use lbpe_core::{pretokenize, CharClass, PreTokenizerConfig};
use proptest::prelude::*;

fn texts() -> impl Strategy<Value = String> {
    prop_oneof![
        any::<String>(),
        "[a-zA-Z0-9 \t\n.,!?'\u{e9}\u{663}\u{3000}-]{0,40}",
    ]
}

fn configs() -> impl Strategy<Value = PreTokenizerConfig> {
    (any::<bool>(), any::<bool>()).prop_map(|(split_digits, attach_leading_space)| {
        PreTokenizerConfig {
            split_digits,
            attach_leading_space,
        }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn covers_the_text_exactly(text in texts(), cfg in configs()) {
        let pts = pretokenize(&text, &cfg);
        let joined: String = pts.iter().map(|p| p.text).collect();
        prop_assert_eq!(&joined, &text);
        let mut next = 0;
        for p in &pts {
            prop_assert!(!p.text.is_empty());
            prop_assert_eq!(p.char_span.start, next);
            prop_assert_eq!(p.char_span.len(), p.text.chars().count());
            next = p.char_span.end;
        }
        prop_assert_eq!(next, text.chars().count());
    }

    #[test]
    fn classes_never_mix(text in texts(), cfg in configs()) {
        for p in pretokenize(&text, &cfg) {
            let mut classes: Vec<CharClass> = p.text.chars().map(CharClass::of).collect();
            if cfg.attach_leading_space && p.text.starts_with(' ') && classes.len() > 1
                && classes[1] == CharClass::Letter
            {
                classes.remove(0);
            }
            prop_assert!(classes.windows(2).all(|w| w[0] == w[1]), "{:?}", p.text);
        }
    }

    #[test]
    fn digits_stand_alone(text in texts()) {
        for p in pretokenize(&text, &PreTokenizerConfig::default()) {
            if p.text.chars().any(|c| CharClass::of(c) == CharClass::Digit) {
                prop_assert_eq!(p.text.chars().count(), 1);
            }
        }
    }

    #[test]
    fn pretokens_are_fixed_points(text in texts(), cfg in configs()) {
        for p in pretokenize(&text, &cfg) {
            let again: Vec<&str> = pretokenize(p.text, &cfg).iter().map(|q| q.text).collect();
            prop_assert_eq!(again, vec![p.text]);
        }
    }

    #[test]
    fn boundaries_are_local(a in texts(), b in texts(), cfg in configs()) {
        // Splitting at an existing boundary does not change either side.
        let text = format!("{a}{b}");
        let whole: Vec<&str> = pretokenize(&text, &cfg).iter().map(|p| p.text).collect();
        let cut = a.len();
        if whole.iter().scan(0, |n, p| { *n += p.len(); Some(*n) }).any(|n| n == cut) {
            let left: Vec<&str> = pretokenize(&a, &cfg).iter().map(|p| p.text).collect();
            prop_assert_eq!(&whole[..left.len()], left.as_slice());
        }
    }
}

#[test]
fn fused_space_only_before_letters() {
    let cfg = PreTokenizerConfig::default();
    let split = |s: &str| -> Vec<String> {
        pretokenize(s, &cfg)
            .iter()
            .map(|p| p.text.to_owned())
            .collect()
    };
    assert_eq!(split("one two"), ["one", " two"]);
    assert_eq!(split("one  two"), ["one", " ", " two"]);
    assert_eq!(split("a\n b"), ["a", "\n", " b"]);
    assert_eq!(split("x ,y"), ["x", " ", ",", "y"]);
    assert_eq!(split("x 1999"), ["x", " ", "1", "9", "9", "9"]);
    assert_eq!(split(" Capitals"), [" Capitals"]);
    assert_eq!(split("\u{3000}word"), ["\u{3000}", "word"]);
}
