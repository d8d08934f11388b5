use std::fs;

use blastlab::levels::{
    certify_winnable, generate_curriculum, generate_eval_set, generate_ladder, load_level_set,
    mechanics_in, save_level_set, CurriculumSpec, LadderSpec, Mechanic,
};

#[test]
fn same_seed_gives_identical_files() {
    let spec = CurriculumSpec::with_dims(6, 6, 5, 2, 9);
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    for d in &dirs {
        save_level_set(&generate_curriculum(&spec).unwrap(), d.path()).unwrap();
    }
    let mut names: Vec<_> = fs::read_dir(dirs[0].path())
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    names.sort();
    assert_eq!(names.len(), 10);
    for n in &names {
        assert_eq!(
            fs::read(dirs[0].path().join(n)).unwrap(),
            fs::read(dirs[1].path().join(n)).unwrap(),
            "{n:?} differs"
        );
    }
    let back = load_level_set(dirs[0].path()).unwrap();
    assert_eq!(back.len(), 10);

    let other = generate_curriculum(&CurriculumSpec { seed: 10, ..spec }).unwrap();
    assert_ne!(other, back);
}

#[test]
fn every_generated_level_validates_and_is_winnable() {
    let spec = CurriculumSpec::with_dims(9, 13, 10, 1, 4);
    let levels = generate_curriculum(&spec).unwrap();
    for (tier, level) in levels.iter().enumerate() {
        level.validate().unwrap();
        assert!(certify_winnable(level, 0), "{} not certified", level.id);
        for m in mechanics_in(level) {
            assert!(
                spec.mechanics_at(tier).contains(&m),
                "{} uses {m:?} too early",
                level.id
            );
        }
    }
}

#[test]
fn eval_set_with_new_mechanics_uses_them() {
    let spec = CurriculumSpec::with_dims(9, 13, 10, 1, 4);
    let set = generate_eval_set(&spec, 4, &[Mechanic::Teleporter]).unwrap();
    assert_eq!(set.len(), 4);
    for level in &set {
        assert!(
            mechanics_in(level).contains(&Mechanic::Teleporter),
            "{}",
            level.id
        );
    }
}

#[test]
fn ladder_is_deterministic_and_monotone() {
    let spec = LadderSpec {
        width: 6,
        height: 6,
        count: 8,
        color_count: 4,
        goal_count: (8, 30),
        rock_density: (0.0, 0.2),
        move_limit: 20,
        seed: 7,
    };
    let a = generate_ladder(&spec).unwrap();
    assert_eq!(a, generate_ladder(&spec).unwrap());
    let goals: Vec<u32> = a.iter().map(|l| l.total_goal_requirement()).collect();
    assert!(goals.windows(2).all(|w| w[0] <= w[1]), "{goals:?}");
}
