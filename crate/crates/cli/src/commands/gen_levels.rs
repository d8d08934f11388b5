use std::path::{Path, PathBuf};

use blastlab::levels::{
    generate_curriculum, generate_eval_set, generate_ladder, serialize_level, CurriculumSpec,
    LadderSpec, Mechanic, FILE_EXTENSION,
};

use crate::config::{to_toml, GenLevelsConfig, LevelSetKind};
use crate::error::{CliError, CliResult};
use crate::output::Outputs;

/// Writes `<out>/levels/<name>/<levelId>.lvl`; returns the set directory.
pub fn gen_levels(root: &Path, cfg: &GenLevelsConfig) -> CliResult<PathBuf> {
    let name = if cfg.name.is_empty() {
        cfg.kind.name()
    } else {
        &cfg.name
    };
    let curriculum =
        CurriculumSpec::with_dims(cfg.width, cfg.height, cfg.tiers, cfg.per_tier, cfg.seed);
    let levels = match cfg.kind {
        LevelSetKind::Curriculum => generate_curriculum(&curriculum),
        LevelSetKind::Eval => {
            let new = cfg
                .new_mechanics
                .iter()
                .map(|m| {
                    Mechanic::parse(m)
                        .ok_or_else(|| CliError::usage(format!("unknown mechanic {m:?}")))
                })
                .collect::<CliResult<Vec<_>>>()?;
            generate_eval_set(&curriculum, cfg.count, &new)
        }
        LevelSetKind::Ladder => {
            let l = &cfg.ladder;
            generate_ladder(&LadderSpec {
                width: cfg.width,
                height: cfg.height,
                count: l.count,
                color_count: l.colors,
                goal_count: (l.goal_min, l.goal_max),
                rock_density: (l.rock_density_min, l.rock_density_max),
                move_limit: l.move_limit,
                seed: cfg.seed,
            })
        }
    }
    .map_err(CliError::usage)?;

    let mut out = Outputs::begin(root, &format!("gen-levels-{name}"), &to_toml(cfg)?)?;
    let dir = format!("levels/{name}");
    for mut level in levels {
        level
            .tags
            .insert("config".into(), out.snapshot().to_string());
        let text = serialize_level(&level).map_err(CliError::internal)?;
        out.write_bytes(
            &format!("{dir}/{}.{FILE_EXTENSION}", level.id),
            text.as_bytes(),
        )?;
    }
    out.commit();
    Ok(root.join(dir))
}
