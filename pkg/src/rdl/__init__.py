"""Edge-coloured complete symmetric digraphs on the positive integers.

Colouring rules, monochromatic path search, level partitions, density
estimates, c_r structure recognition and path covers on finite views.
"""

from rdl.colouring import (
    BLUE, RED, ColouringRule, DensityZero, Explicit, Extremal, Perturbed, PrefixView,
    ProductExtremal, SeededRandom, class_tuple, materialize, parse_rule, parse_view, prefix,
    read_view, residue_class, serialize_view, write_view,
)
from rdl.cover import (
    HarnessReport, PathCover, Trial, conjecture_harness, greedy_path_cover, min_path_cover_exact,
)
from rdl.density import (
    DensityProfile, exact_periodic_density, path_density, profile, upper_density_estimate,
)
from rdl.errors import (
    BudgetExceeded, DepthCapReached, HarnessInfeasible, InvalidPairError, NotCrStructure,
    OutOfDomainError, ParseError, PreconditionViolation, RdlError, RedPathTooLong, SpliceIncomplete,
)
from rdl.paths import (
    DirectedPath, LevelPartition, Orientation, OrientedPath, PathReport, SearchBudget, bitrev_key,
    count_switches, greedy_mono_path, level_partition, longest_from, longest_mono_path_exact,
    mono_walk_sample, splice_via_matching, validate_path,
)
from rdl.structure import (
    CrStructure, PatternReport, Violation, claim1_check, detect_cr_structure, min_hitting_set,
    pattern_check,
)

__version__ = "0.1.0"
