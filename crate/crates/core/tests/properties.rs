use proptest::prelude::*;

use stemeval::corpus::{build_vocabulary, tokenize, TokenizedDocument, TokenizerConfig};
use stemeval::embeddings::{self, cosine, EmbeddingProvider, EmbeddingProviderSpec};
use stemeval::intrinsic::{self, levenshtein, AnldWeighting};
use stemeval::normalizer::{Normalizer, NormalizerKind, NormalizerSpec};

fn word() -> impl Strategy<Value = String> {
    "[a-zé]{1,9}"
}

fn docs() -> impl Strategy<Value = Vec<TokenizedDocument>> {
    prop::collection::vec(prop::collection::vec(word(), 1..8), 1..8).prop_map(|docs| {
        docs.into_iter()
            .enumerate()
            .map(|(i, tokens)| TokenizedDocument {
                doc_id: format!("d{i}"),
                tokens,
            })
            .collect()
    })
}

fn normalizer(kind: NormalizerKind) -> Normalizer {
    Normalizer::new(&NormalizerSpec::new(kind)).unwrap()
}

fn any_token_level() -> impl Strategy<Value = NormalizerKind> {
    prop_oneof![
        Just(NormalizerKind::Identity),
        Just(NormalizerKind::SnowballEn),
        (1usize..6).prop_map(|n| NormalizerKind::Truncate { n }),
    ]
}

proptest! {
    #[test]
    fn tokenize_is_idempotent(text in "[ a-zA-Z,.!?'\"()-]{0,60}") {
        let config = TokenizerConfig::default();
        let once = tokenize(&text, &config);
        let twice = tokenize(&once.join(" "), &config);
        prop_assert_eq!(once, twice);
    }

    #[test]
    fn vocabulary_ignores_document_order(mut d in docs()) {
        let before = build_vocabulary(&d);
        d.reverse();
        prop_assert_eq!(before, build_vocabulary(&d));
    }

    #[test]
    fn levenshtein_metric_axioms(a in "[abc]{0,6}", b in "[abc]{0,6}", c in "[abc]{0,6}") {
        let ab = levenshtein(&a, &b);
        prop_assert_eq!(ab, levenshtein(&b, &a));
        prop_assert_eq!(levenshtein(&a, &a), 0);
        prop_assert!(levenshtein(&a, &c) <= ab + levenshtein(&b, &c));
        prop_assert!(ab >= a.len().abs_diff(b.len()) && ab <= a.len().max(b.len()));
    }

    #[test]
    fn memoization_is_transparent(d in docs(), kind in any_token_level()) {
        let n = normalizer(kind);
        let out = n.normalize_corpus(&d).unwrap();
        for (orig, norm) in d.iter().zip(&out.docs) {
            let direct: Vec<String> = orig.tokens.iter().map(|t| n.normalize_token(t).unwrap()).collect();
            prop_assert_eq!(&norm.tokens, &direct);
        }
    }

    #[test]
    fn anld_weightings_under_repetition(d in docs(), times in 2usize..4, kind in any_token_level()) {
        let n = normalizer(kind);
        let once = n.normalize_corpus(&d).unwrap().mapping;
        let repeated: Vec<TokenizedDocument> = d
            .iter()
            .map(|doc| TokenizedDocument {
                doc_id: doc.doc_id.clone(),
                tokens: doc.tokens.iter().cycle().take(doc.tokens.len() * times).cloned().collect(),
            })
            .collect();
        let many = n.normalize_corpus(&repeated).unwrap().mapping;
        for w in [AnldWeighting::ByType, AnldWeighting::ByOccurrence] {
            let a = intrinsic::anld(&once, w, 0).unwrap().anld;
            let b = intrinsic::anld(&many, w, 0).unwrap().anld;
            prop_assert!((a - b).abs() < 1e-12, "{:?}: {} vs {}", w, a, b);
        }
    }

    #[test]
    fn shorter_truncation_distorts_more(d in docs(), n in 1usize..6) {
        let anld = |n| {
            let m = normalizer(NormalizerKind::Truncate { n }).normalize_corpus(&d).unwrap().mapping;
            intrinsic::anld(&m, AnldWeighting::ByOccurrence, 0).unwrap().anld
        };
        prop_assert!(anld(n) >= anld(n + 1));
    }

    #[test]
    fn compression_at_least_one(d in docs(), kind in any_token_level()) {
        let out = normalizer(kind).normalize_corpus(&d).unwrap();
        let cr = intrinsic::compression_ratio(&build_vocabulary(&d), &build_vocabulary(&out.docs)).unwrap();
        prop_assert!(cr.cr >= 1.0);
    }

    #[test]
    fn cosine_scale_invariant(
        u in prop::collection::vec(-10.0f64..10.0, 8),
        v in prop::collection::vec(-10.0f64..10.0, 8),
        s in 0.01f64..100.0,
    ) {
        prop_assume!(u.iter().any(|x| x.abs() > 1e-3) && v.iter().any(|x| x.abs() > 1e-3));
        let base = cosine(&u, &v).unwrap().value;
        let scaled: Vec<f64> = u.iter().map(|x| x * s).collect();
        prop_assert!((cosine(&scaled, &v).unwrap().value - base).abs() < 1e-12);
        prop_assert!((-1.0..=1.0).contains(&base));
    }

    #[test]
    fn irs_ignores_document_order(d in docs(), n in 1usize..5) {
        let provider = EmbeddingProvider::new(&EmbeddingProviderSpec::hashed(64, 3)).unwrap();
        let norm = normalizer(NormalizerKind::Truncate { n }).normalize_corpus(&d).unwrap().docs;
        let a = embeddings::irs(&provider, &d, &norm).unwrap().irs;
        let (mut d2, mut norm2) = (d.clone(), norm.clone());
        d2.reverse();
        norm2.reverse();
        let b = embeddings::irs(&provider, &d2, &norm2).unwrap().irs;
        prop_assert!((a - b).abs() < 1e-12);
    }
}
