"""Bar-array neck orthosis toolkit.

Bending mechanics of the compliant bar array, head statics about C7, EMG
envelope extraction and the paired signed-rank test, re-exported from the
compiled module.
"""

from ._neckflex import (
    AssistProfile,
    AssistSample,
    BarArraySpec,
    BenchNoise,
    BendSample,
    BendTestTrace,
    Branch,
    BranchDir,
    EnvelopeParams,
    FitResult,
    FrameForces,
    HeadStatics,
    MomentCurve,
    MomentSample,
    NumericError,
    ParseError,
    Plane,
    PlanTiming,
    PlannedCycle,
    PMethod,
    PostureTarget,
    StaticsResult,
    StiffnessMode,
    TrialPlan,
    Vec2,
    WilcoxonResult,
    assist_fraction,
    base_force_moment,
    base_moment,
    end_shortening,
    envelope,
    equivalent_inertia,
    fit_parameters,
    gamma_integral,
    generate_sequence,
    gravity_moment,
    head_frame_forces,
    ideal_base_moment,
    moment_curve,
    muscle_moment,
    preload_offset,
    read_bend_csv,
    read_plan_csv,
    single_bar_inertia,
    standard_postures,
    synthesize_bend_trace,
    transition_angle,
    wilcoxon_signed_rank,
    write_bend_csv,
    write_plan_csv,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
