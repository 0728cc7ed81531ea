use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::envgrid::{Color, ObjKind};

#[test]
fn descriptions() {
    assert_eq!(
        describe(Event::facing(Color::Red, ObjKind::Ball)),
        "you are standing in front of the red ball"
    );
    assert_eq!(
        describe(Event::holding(Color::Red, ObjKind::Ball)),
        "you have picked up the red ball"
    );
    assert_eq!(describe(Event::opened(Color::Green)), "you have opened the green door");
}

#[test]
fn root_instructions() {
    assert_eq!(to_instruction(Event::facing(Color::Red, ObjKind::Ball)), "go to the red ball");
    assert_eq!(to_instruction(Event::holding(Color::Red, ObjKind::Ball)), "pick up the red ball");
    assert_eq!(to_instruction(Event::opened(Color::Blue)), "open the blue door");
}

#[test]
fn describe_and_instruct_are_injective() {
    let vocab = Event::vocabulary();
    let d: std::collections::HashSet<_> = vocab.iter().map(|&e| describe(e)).collect();
    let i: std::collections::HashSet<_> = vocab.iter().map(|&e| to_instruction(e)).collect();
    assert_eq!(d.len(), vocab.len());
    assert_eq!(i.len(), vocab.len());
}

#[test]
fn grammar_meets_minimum_sizes() {
    use crate::envgrid::EventKind;
    for k in EventKind::ALL {
        assert!(grammar::verbs(k).len() >= 10);
    }
    for c in Color::ALL {
        assert!(grammar::color_words(c).len() >= 4);
    }
    for o in ObjKind::ALL {
        assert!(grammar::nouns(o).len() >= 3);
    }
    for e in Event::vocabulary() {
        assert_eq!(grammar::phrase(e, 0), to_instruction(e));
        assert!(grammar::capacity(e) >= DEFAULT_SYNONYMS);
    }
}

#[test]
fn synonym_set_partition() {
    let e = Event::facing(Color::Red, ObjKind::Ball);
    let set = gen_synonyms(e, 50, 17).unwrap();
    assert_eq!(set.train.len(), 45);
    assert_eq!(set.holdout.len(), 5);
    assert_eq!(set.train[0], "go to the red ball");
    assert_eq!(set.root, "go to the red ball");
    set.validate().unwrap();
    assert_eq!(set, gen_synonyms(e, 50, 17).unwrap());
    assert_ne!(set, gen_synonyms(e, 50, 18).unwrap());
}

#[test]
fn grammar_can_say_lift_up_the_crimson_ball() {
    let e = Event::holding(Color::Red, ObjKind::Ball);
    let all = gen_synonyms(e, grammar::capacity(e), 0).unwrap();
    assert!(all.iter().any(|s| s == "lift up the crimson ball"));
}

#[test]
fn synonym_capacity_errors() {
    let e = Event::opened(Color::Grey);
    assert!(matches!(gen_synonyms(e, 5, 0), Err(GlideError::Capacity(_))));
    assert!(matches!(
        gen_synonyms(e, grammar::capacity(e) + 1, 0),
        Err(GlideError::Capacity(_))
    ));
    assert!(gen_synonyms(e, 6, 0).is_ok());
}

#[test]
fn db_covers_vocabulary_and_round_trips() {
    let db = SynonymDb::generate(50, 3).unwrap();
    assert_eq!(db.len(), 48);
    let text = db.to_jsonl();
    assert_eq!(text.lines().count(), 48);
    assert_eq!(SynonymDb::from_jsonl(&text).unwrap(), db);
    assert_eq!(SynonymDb::generate(50, 3).unwrap().to_jsonl(), text);
}

#[test]
fn db_loader_rejects_malformed_files() {
    let db = SynonymDb::generate(20, 1).unwrap();
    let text = db.to_jsonl();
    let missing: String = text.lines().skip(1).map(|l| format!("{l}\n")).collect();
    assert!(SynonymDb::from_jsonl(&missing).is_err());
    let first = text.lines().next().unwrap();
    let dup = format!("{text}{first}\n");
    assert!(SynonymDb::from_jsonl(&dup).is_err());
    let no_root = text.replacen("\"root\":\"go to the red ball\"", "\"root\":\"go to the red orb!\"", 1);
    assert!(SynonymDb::from_jsonl(&no_root).is_err());
    assert!(SynonymDb::from_jsonl("not json\n").is_err());
    // Cross-event collision: copy a FACING:red:box string into FACING:red:ball.
    let mut sets: Vec<SynonymSet> = db.sets().cloned().collect();
    let stolen = sets[1].train[1].clone();
    sets[0].train.push(stolen);
    assert!(SynonymDb::from_sets(sets).is_err());
}

#[test]
fn header_line_survives_round_trip() {
    let header = db::DbHeader {
        config_hash: "abc".into(),
        m: 50,
        seed: 9,
    };
    let db = SynonymDb::generate(50, 9).unwrap().with_header(header.clone());
    let back = SynonymDb::from_jsonl(&db.to_jsonl()).unwrap();
    assert_eq!(back.header(), Some(&header));
}

#[test]
fn sampling_respects_partitions() {
    let db = SynonymDb::generate(50, 5).unwrap();
    let e = Event::facing(Color::Blue, ObjKind::Key);
    let set = db.get(e).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..2000 {
        let i = sample_instruction(&db, e, &mut rng, Partition::Train).unwrap();
        assert!(set.train.contains(&i.text));
        assert_eq!(set.get(i.synonym_index), Some(i.text.as_str()));
        let h = sample_instruction(&db, e, &mut rng, Partition::Holdout).unwrap();
        assert!(set.holdout.contains(&h.text));
        assert!(h.synonym_index >= set.train.len() && h.synonym_index < set.len());
    }
}

#[test]
fn reached_uses_current_step_only() {
    let goal = Event::facing(Color::Red, ObjKind::Ball);
    let mut trace = EventTrace::new();
    assert!(!reached(&trace, goal));
    trace.record(vec![goal]);
    assert!(reached(&trace, goal));
    trace.record(vec![]);
    assert!(!reached(&trace, goal));
    trace.record(vec![Event::opened(Color::Grey)]);
    assert!(reached(&trace, Event::opened(Color::Grey)));
    assert_eq!(trace.flat().count(), 2);
}
