"""Link-level simulator and power-allocation optimizer for layered video
over a massive-MIMO zero-forcing downlink."""

from ._svcmimo import (  # noqa: F401
    CalibrationError,
    CalibrationResult,
    ChannelConfig,
    LayeredVideo,
    LossOutcome,
    PacketTrace,
    ParseError,
    PowerSplit,
    RegressionModel,
    SweepConfig,
    SweepPoint,
    SweepResult,
    ValidationError,
    __version__,
    bit_error_prob,
    calibrate,
    conceal,
    db_to_linear,
    default_candidate_set,
    expected_per,
    expected_total_per,
    fit_regression,
    linear_to_db,
    load_model,
    load_trace,
    packet_error_rate,
    pearson,
    predict,
    preset_names,
    preset_trace,
    preset_video,
    psnr,
    save_model,
    save_trace,
    simulate_losses,
    spatial_info,
    ssim,
    stream_snr,
    sweep,
    synth_trace,
    temporal_info,
    trace_stats,
    video_from_luma,
)
