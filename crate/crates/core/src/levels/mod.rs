//! Level files and procedural level sets.

mod format;
mod generate;
mod search;

pub use format::{
    load_level, load_level_set, parse_level, save_level, save_level_set, serialize_level,
    LevelFileError, FILE_EXTENSION, FORMAT_MAGIC, FORMAT_VERSION,
};
pub use generate::{
    certify_winnable, default_knobs, generate_curriculum, generate_eval_set, generate_ladder,
    mechanics_in, CurriculumSpec, GenerationError, KnobRanges, LadderSpec, Mechanic, TierSpec,
    CONTAINER_HP, DEFAULT_INTRODUCTIONS, EXACT_SEARCH_MAX_CELLS, GREEDY_MIN_WINS, GREEDY_SLACK,
    GREEDY_TRIES,
};
pub use search::winnable_within;
