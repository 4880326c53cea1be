mod common;

use common::{counted_trees, data, doc, fixture};
use readgrade_core::coref::{coref_features, heuristic_chains, parse_coref_sidecar, CorefNormalization};
use readgrade_core::corpus::{baseline_features, count_syllables, load_corpus, Annotation, CorpusManifest, PronunciationLexicon};
use readgrade_core::features::{featurize, read_table_from, write_table_to, FeatureConfig, TreeFallback};
use readgrade_core::lexicon::{
    corpus_frequency_feature, search_count_feature, semantic_proportions, synset_bucket, FrequencyTable, GradedLexicon,
    LevelSchema, SynsetTable,
};
use readgrade_core::syntax::{grammar_features, parsing_features, phrase_counts, GrammarNormalization, GrammarPattern, Pattern};
use readgrade_core::{Error, FeatureRegistry, ParseTree, Resources, TokenizerConfig};

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() < 1e-9
}

#[test]
fn tokenization_examples() {
    let d = doc("I run. She waits.");
    assert_eq!((d.sentence_count(), d.token_count), (2, 4));
    let shipped = TokenizerConfig::from_files(Some(&data("abbreviations.txt")), None, None).unwrap();
    assert!(shipped.abbreviations.contains("dr."));
    let d = readgrade_core::corpus::tokenize("t", "Dr. Smith left.", &shipped).unwrap();
    assert_eq!(d.sentence_count(), 1);
    assert!(matches!(readgrade_core::corpus::tokenize("t", "", &shipped), Err(Error::EmptyDocument)));
}

#[test]
fn syllable_examples() {
    let pron = PronunciationLexicon::load(&data("pronunciations_fixture.txt")).unwrap();
    assert_eq!(count_syllables("water", None), 2);
    assert_eq!(count_syllables("water", Some(&pron)), 2);
    assert_eq!(count_syllables("a", None), 1);
    assert_eq!(pron.get("promise"), Some(2));
    assert_eq!(count_syllables("promise", Some(&pron)), 2);
}

#[test]
fn baseline_examples() {
    let b = baseline_features(&doc("Go."), None, false).unwrap();
    assert_eq!(b.word_number, 0.0);
    let text: String = (0..10)
        .map(|i| format!("{}. ", "W x y z v u t s r q".split(' ').map(|w| format!("{w}{i}")).collect::<Vec<_>>().join(" ")))
        .collect();
    let d = doc(&text);
    assert_eq!((d.token_count, d.sentence_count()), (100, 10));
    assert_eq!(baseline_features(&d, None, false).unwrap().sentence_length, 10.0);
    let b = baseline_features(&doc("water a"), None, false).unwrap();
    assert_eq!(b.syllables, 1.5);
}

fn write(dir: &std::path::Path, name: &str, body: &str) {
    std::fs::write(dir.join(name), body).unwrap();
}

#[test]
fn manifest_bookkeeping() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    write(d, "a.txt", "I run. She waits.");
    write(d, "b.txt", "Dogs bark.");
    write(d, "c.txt", "Birds sing.");
    write(d, "a.tree", "(S (NP (PRP I)) (VP (VBP run)))\n(S (NP (PRP She)) (VP (VBZ waits)))\n");
    write(d, "b.tree", "(S (NP (NNS Dogs)) (VP (VBP bark)))\n");
    write(
        d,
        "m.json",
        r#"{"documents": [{"path": "a.txt", "grade": 1, "tree": "a.tree"}, {"path": "b.txt", "grade": 2, "tree": "b.tree"}, {"path": "c.txt", "grade": 3}]}"#,
    );
    let m = CorpusManifest::load(&d.join("m.json")).unwrap();
    let docs = load_corpus(&m, &TokenizerConfig::default()).unwrap();
    assert_eq!(docs.len(), 3);
    assert_eq!(docs.iter().filter(|d| !d.has(Annotation::Trees)).count(), 1);

    write(d, "bad.json", r#"{"documents": [{"path": "nowhere.txt", "grade": 1}]}"#);
    let m = CorpusManifest::load(&d.join("bad.json")).unwrap();
    let err = load_corpus(&m, &TokenizerConfig::default()).unwrap_err();
    assert!(matches!(err, Error::Load { .. }), "{err}");
}

#[test]
fn manifest_of_342_documents_six_levels() {
    let dir = tempfile::tempdir().unwrap();
    let entries: Vec<String> = (0..342)
        .map(|i| {
            write(dir.path(), &format!("d{i}.txt"), &format!("Lesson {i} is here. Read it."));
            format!(r#"{{"path": "d{i}.txt", "grade": {}}}"#, i % 6 + 1)
        })
        .collect();
    write(dir.path(), "m.json", &format!(r#"{{"documents": [{}]}}"#, entries.join(",")));
    let docs = load_corpus(&CorpusManifest::load(&dir.path().join("m.json")).unwrap(), &TokenizerConfig::default()).unwrap();
    assert_eq!(docs.len(), 342);
    let labels: std::collections::BTreeSet<i64> = docs.iter().map(|d| d.grade.unwrap()).collect();
    assert_eq!(labels.len(), 6);
}

#[test]
fn graded_lexicon_examples() {
    let text = std::fs::read_to_string(fixture("lexicon_gept.tsv")).unwrap();
    let loaded = GradedLexicon::parse("gept", &text, LevelSchema::gept()).unwrap();
    assert_eq!(loaded.lexicon.len(), 3);
    let p = loaded.lexicon.proportions(&doc("cat dog ubiquitous cat"), None);
    let get = |l: &str| p.iter().find(|(k, _)| k == l).unwrap().1;
    assert!(close(get("gept1"), 2.0 / 3.0));
    assert!(close(get("gept3"), 1.0 / 3.0));
    assert_eq!(get("gept2"), 0.0);
    let unmapped = loaded.lexicon.proportions(&doc("zebra quokka"), None);
    assert_eq!(unmapped[0], ("gept0".to_string(), 1.0));
    assert!(unmapped[1..].iter().all(|(_, v)| *v == 0.0));

    let dup = GradedLexicon::parse("gept", "walk\tgept3\nwalk\tgept1\n", LevelSchema::gept()).unwrap();
    assert_eq!(dup.duplicate_warnings, 1);
    assert_eq!(dup.lexicon.level_of("walk"), "gept1");
    assert!(matches!(GradedLexicon::parse("gept", "x\tgept9\n", LevelSchema::gept()), Err(Error::Schema { .. })));
}

#[test]
fn frequency_examples() {
    let one = FrequencyTable::parse("f", "#total\t1000\nzebra\t1000\n").unwrap();
    assert!(close(corpus_frequency_feature(&doc("zebra"), &one), 0.0));
    let two = FrequencyTable::parse("f", "#total\t100\nzebra\t1\nquokka\t3\n").unwrap();
    assert!(close(corpus_frequency_feature(&doc("zebra quokka"), &two), 0.02f64.ln()));
    assert!((0.02f64.ln() + 3.912).abs() < 1e-3);
    assert_eq!(corpus_frequency_feature(&doc("wombat"), &two), two.floor_value());

    let counts = FrequencyTable::parse("s", "zebra\t1000\nquokka\t10\nwombat\t10\n").unwrap();
    assert!(close(search_count_feature(&doc("zebra"), &counts), 1000f64.ln()));
    assert!(close(search_count_feature(&doc("quokka wombat"), &counts), 10f64.ln()));
    let empty = FrequencyTable::parse("s", "#total\t50\n").unwrap();
    assert_eq!(search_count_feature(&doc("zebra"), &empty), empty.floor_value());
}

#[test]
fn synset_examples() {
    assert_eq!(synset_bucket(17).unwrap(), 4);
    assert_eq!(synset_bucket(50).unwrap(), 7);
    assert_eq!(synset_bucket(1).unwrap(), 1);
    let t = SynsetTable::parse("s", "zebra\t17\nquokka\t1\nw1\t4\nw2\t4\nw3\t4\nw4\t4\n").unwrap();
    assert_eq!(semantic_proportions(&doc("wombat koala"), &t), [0.0; 7]);
    let p = semantic_proportions(&doc("zebra quokka"), &t);
    assert_eq!((p[3], p[0]), (0.5, 0.5));
    assert_eq!(semantic_proportions(&doc("w1 w2 w3 w4"), &t)[1], 1.0);
}

#[test]
fn tree_examples() {
    let t = ParseTree::parse("(X (Y a))").unwrap();
    assert_eq!(t.label(), "X");
    assert_eq!(t.children().len(), 1);
    assert_eq!(t.children()[0].label(), "Y");
    assert_eq!(t.yield_words(), vec!["a"]);
    assert!(matches!(ParseTree::parse("(S (NP)"), Err(Error::TreeSyntax { .. })));
    assert_eq!(ParseTree::leaf("w").height(), 0);
    let mut chain = ParseTree::leaf("w");
    for i in 0..5 {
        chain = ParseTree::node(format!("L{i}"), vec![chain]);
    }
    assert_eq!(chain.height(), 5);
}

#[test]
fn fixture_trees_match_hand_counts() {
    let trees = counted_trees();
    assert_eq!(trees.len(), 10);
    for c in &trees {
        let label = c.tree.to_string();
        assert_eq!(c.tree.height(), c.height, "height of {label}");
        assert_eq!(c.tree.internal_count(), c.internal, "internal nodes of {label}");
        assert_eq!(c.tree.yield_words().len(), c.terminals, "terminals of {label}");
        let p = phrase_counts(&c.tree, true);
        assert_eq!((p.np, p.vp, p.sbar, p.pp), (c.np, c.vp, c.sbar, c.pp), "phrases of {label}");
        let f = parsing_features(std::slice::from_ref(&c.tree), 1, true).unwrap();
        assert_eq!(f.tree_height, c.height as f64);
        assert_eq!((f.np, f.vp, f.sbar, f.pp), (c.np as f64, c.vp as f64, c.sbar as f64, c.pp as f64));
    }
}

#[test]
fn parsing_feature_examples() {
    let t = ParseTree::parse("(S (NP (PRP I)) (VP (VBP run)))").unwrap();
    let twice = parsing_features(&[t.clone(), t.clone()], 2, true).unwrap();
    assert_eq!(twice, parsing_features(std::slice::from_ref(&t), 1, true).unwrap());
    let h2 = ParseTree::parse("(X (Y a))").unwrap();
    let h4 = ParseTree::parse("(A (B (C (D a))))").unwrap();
    assert_eq!(parsing_features(&[h2, h4], 2, true).unwrap().tree_height, 3.0);
    assert!(matches!(parsing_features(&[t.clone(), t.clone(), t], 2, true), Err(Error::AnnotationMismatch(_))));
    let none = parsing_features(&[ParseTree::parse("(X (Y a))").unwrap()], 1, true).unwrap();
    assert_eq!((none.np, none.vp, none.sbar, none.pp), (0.0, 0.0, 0.0, 0.0));
}

#[test]
fn pattern_examples() {
    let passive = readgrade_core::syntax::parse_tree_file(&fixture("passive.tree")).unwrap();
    assert_eq!(Pattern::compile("VP < VBN").unwrap().count_matches(&passive[0], true), 1);
    let np = ParseTree::parse("(NP (DT the) (NN cat))").unwrap();
    assert_eq!(Pattern::compile("NP << NP").unwrap().count_matches(&np, true), 0);
    assert!(matches!(Pattern::compile("S < ("), Err(Error::PatternSyntax { .. })));
}

#[test]
fn grammar_examples() {
    let t = ParseTree::parse("(S (NP (DT the) (NN cat)) (VP (VBD sat) (PP (IN on) (NP (DT the) (NN mat)))))").unwrap();
    let trees = vec![t.clone(), ParseTree::parse("(S (VP (VB Go)))").unwrap()];
    let none = [GrammarPattern::new("x", 1, "SBAR < IN").unwrap()];
    assert_eq!(grammar_features(&trees, &none, 2, 8, GrammarNormalization::PerSentence, true).unwrap(), [0.0; 6]);
    // NP < DT matches twice in the first tree; two sentences
    let g4 = [GrammarPattern::new("np-det", 4, "NP < DT").unwrap()];
    assert_eq!(
        grammar_features(&trees, &g4, 2, 8, GrammarNormalization::PerSentence, true).unwrap(),
        [0.0, 0.0, 0.0, 1.0, 0.0, 0.0]
    );
    let dup = [GrammarPattern::new("a", 2, "S < VP").unwrap(), GrammarPattern::new("a", 2, "S < VP").unwrap()];
    let g = grammar_features(&trees, &dup, 2, 8, GrammarNormalization::PerSentence, true).unwrap();
    assert_eq!(g[1], 2.0);
}

#[test]
fn coref_examples() {
    let d = doc("Alice ran. Alice jumped.");
    let chains = heuristic_chains(&d);
    assert_eq!(chains.len(), 1);
    assert_eq!(chains[0].anaphora.len(), 1);
    assert!(heuristic_chains(&doc("the dog ran fast.")).is_empty());
    let she = heuristic_chains(&doc("Alice ran. She jumped."));
    assert_eq!(she.len(), 1);
    assert_eq!(she[0].anaphora[0].kind, readgrade_core::coref::MentionKind::Pronoun);

    let d4 = doc("Alice ran. She ate. Bob sat. She slept.");
    assert!(parse_coref_sidecar("[]", &d4).unwrap().is_empty());
    let chain = r#"[[{"sentence":0,"start":0,"end":0,"kind":"proper_noun"},{"sentence":1,"start":0,"end":0,"kind":"pronoun"},{"sentence":3,"start":0,"end":0,"kind":"pronoun"}]]"#;
    let chains = parse_coref_sidecar(chain, &d4).unwrap();
    assert_eq!(chains.len(), 1);
    assert_eq!(chains[0].anaphora.len(), 2);
    let f = coref_features(&d4, &chains, CorefNormalization::PerSentence).unwrap();
    assert_eq!((f.corefer_chain, f.corefer_distance, f.antecedent), (2.0, 2.0, 1.0));
    let beyond = r#"[[{"sentence":0,"start":0,"end":5,"kind":"proper_noun"},{"sentence":1,"start":0,"end":0,"kind":"pronoun"}]]"#;
    assert!(matches!(parse_coref_sidecar(beyond, &d4), Err(Error::AnnotationMismatch(_))));
    let two = r#"[[{"sentence":0,"start":0,"end":0,"kind":"proper_noun"},{"sentence":1,"start":0,"end":0,"kind":"pronoun"}],
                 [{"sentence":2,"start":0,"end":0,"kind":"proper_noun"},{"sentence":3,"start":0,"end":0,"kind":"pronoun"}]]"#;
    let f = coref_features(&d4, &parse_coref_sidecar(two, &d4).unwrap(), CorefNormalization::PerSentence).unwrap();
    assert_eq!((f.antecedent, f.corefer_chain), (2.0, 1.0));
    let plain = doc("the dog ran fast.");
    let f = coref_features(&plain, &[], CorefNormalization::PerSentence).unwrap();
    assert_eq!((f.pronoun, f.proper_noun, f.antecedent, f.corefer_chain, f.corefer_distance), (0.0, 0.0, 0.0, 0.0, 0.0));
}

fn full_resources() -> Resources {
    Resources {
        gept: Some(GradedLexicon::parse("g", "cat\tgept1\n", LevelSchema::gept()).unwrap().lexicon),
        vq: Some(GradedLexicon::parse("v", "cat\tvq3\n", LevelSchema::vq()).unwrap().lexicon),
        bnc: Some(FrequencyTable::parse("b", "#total\t100\ncat\t5\n").unwrap()),
        search_counts: Some(FrequencyTable::parse("s", "cat\t50\n").unwrap()),
        synsets: Some(SynsetTable::parse("w", "cat\t8\n").unwrap()),
        patterns: readgrade_core::syntax::starter_patterns(),
        ..Resources::default()
    }
}

#[test]
fn featurize_completeness_and_masking() {
    let reg = FeatureRegistry::default();
    let res = full_resources();
    let mut d = doc("Tom saw a cat. He ran.");
    d.attach_trees(vec![
        ParseTree::parse("(S (NP (NNP Tom)) (VP (VBD saw) (NP (DT a) (NN cat))))").unwrap(),
        ParseTree::parse("(S (NP (PRP He)) (VP (VBD ran)))").unwrap(),
    ]);
    let chains = parse_coref_sidecar(
        r#"[[{"sentence":0,"start":0,"end":0,"kind":"proper_noun"},{"sentence":1,"start":0,"end":0,"kind":"pronoun"}]]"#,
        &d,
    )
    .unwrap();
    d.attach_coref(chains);
    let v = featurize(&d, &res, &FeatureConfig::default(), &reg).unwrap();
    assert_eq!(v.values.len(), 47);
    assert!(v.missing.iter().all(|m| !m));

    let bare = doc("Tom saw a cat. He ran.");
    let v = featurize(&bare, &res, &FeatureConfig::default(), &reg).unwrap();
    assert_eq!(v.missing.iter().filter(|&&m| m).count(), 11);
    assert!(v.provenance.heuristic_coref);
    let flat = featurize(&bare, &res, &FeatureConfig { tree_fallback: TreeFallback::Flat, ..FeatureConfig::default() }, &reg).unwrap();
    assert!(flat.missing.iter().all(|m| !m));
    assert!(flat.provenance.flat_trees);
}

#[test]
fn table_round_trip() {
    let reg = FeatureRegistry::default();
    let res = full_resources();
    let texts = ["Tom saw a cat.", "The cat ran home. It was late.", "A dog barked loudly at night."];
    let mut vectors: Vec<_> = (0..10)
        .map(|i| {
            let d = doc(texts[i % 3]).with_grade(i as i64 % 3 + 1);
            let mut v = featurize(&d, &res, &FeatureConfig::default(), &reg).unwrap();
            v.doc_id = format!("d{i}");
            v
        })
        .collect();
    vectors[2].values[0] = 0.1 + 0.2;
    let mut buf = Vec::new();
    assert_eq!(write_table_to(&mut buf, &vectors, &reg).unwrap(), (10, 48));
    let back = read_table_from(buf.as_slice(), &reg).unwrap();
    for (a, b) in vectors.iter().zip(&back) {
        assert_eq!(a.doc_id, b.doc_id);
        assert_eq!(a.missing, b.missing);
        assert_eq!(a.grade, b.grade);
        for ((x, y), m) in a.values.iter().zip(&b.values).zip(&a.missing) {
            if !m {
                assert_eq!(x.to_bits(), y.to_bits());
            }
        }
    }
    let mut empty = Vec::new();
    assert_eq!(write_table_to(&mut empty, &[], &reg).unwrap(), (0, 48));
    assert_eq!(String::from_utf8(empty).unwrap().lines().count(), 1);
}
