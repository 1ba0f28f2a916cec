from inspect import cleandoc

C_Version = '1.0.0'

C_SpeedOfSound = 343.0
C_HeadRadius = 0.0875
C_ShadowFloor = 0.6
C_SampleRate = 44100
C_ClipSeconds = 0.060

C_Orientations = (0, 90, 180, 270)
C_WallNames = ('-x', '+x', '-y', '+y', 'floor', 'ceiling')

C_DepthValidThreshold = 1e-3
C_NormalDiscontinuity = 0.1
C_NormalThresholds = (11.25, 22.5, 30.0)
C_LeakySlope = 0.2

C_BlobMagic = b'VETS'
C_BlobVersion = 1
C_CheckpointMagic = b'VETC'

C_ManifestName = 'manifest.jsonl'
C_SplitName = 'split.json'
C_SpecStatsName = 'spec_stats.json'
C_SummaryName = 'summary.json'
C_CheckpointName = 'checkpoint.vetc'
C_CheckpointMetaName = 'checkpoint.json'
C_TrainLogName = 'log.csv'
C_ReportName = 'report.csv'
C_ReportSeedsName = 'report_per_seed.csv'
C_ReportSummaryName = 'summary.json'

T_Log_SceneGenerated = 'generated scene {0} [extents {1}] [obstacles {2}] [poses {3}]'
T_Log_DatasetWritten = 'dataset written to {0} [scenes {1}] [records {2}] [views {3}]'
T_Log_SplitDone = 'split [train {0}] [val {1}] [test {2}]'
T_Log_Epoch = '{0} epoch {1}/{2} [train loss {3:.5f}] [val loss {4:.5f}] [val {5} {6:.4f}]'
T_Log_CheckpointSaved = 'checkpoint saved to {0} [{1} parameters]'
T_Log_CheckpointLoaded = 'encoder initialized from {0} [{1} parameters]'
T_Log_ExperimentStart = 'experiment {0} started [seeds {1}] [output {2}]'
T_Log_ExperimentDone = 'experiment {0} done [{1} rows] -> {2}'
T_Log_ValidatedCommand = 'on_validated_command [{0}] {1}'
T_Log_Profile = '[{0}] {1} took {2:.3f}s'
T_Log_GradCheck = 'gradcheck {0:24} max rel err {1:.2e} {2}'

T_ConfigError = '❌ Invalid configuration at `{0}`: {1}'
T_ConfigFileError = '❌ Could not read configuration file `{0}`: {1}'
T_SceneError = '❌ Scene generation failed: {0}'
T_SourceOutsideRoom = '❌ Source position {0} is not strictly inside the room'
T_RenderError = '❌ Pose {0} lies inside the scene geometry'
T_AliasingError = '❌ Sweep end frequency {0} Hz is not below Nyquist ({1} Hz)'
T_ChirpError = '❌ Invalid chirp (f0 {0} Hz, f1 {1} Hz, duration {2} s): expected 0 < f0 < f1 and duration > 0'
T_InvalidOrder ='❌ Reflection order must be non-negative (given: {0})'
T_NotPowerOfTwo = '❌ FFT length must be a power of two (given: {0})'
T_WindowTooLong = '❌ Waveform of {0} samples is shorter than one window of {1} samples'
T_BadStftParams = '❌ Invalid STFT parameters (win {0}, hop {1}, nfft {2})'
T_ShapeMismatch = '❌ Shape mismatch in layer `{0}`: {1}'
T_BackwardWithoutForward = '❌ backward called on `{0}` before any forward pass'
T_UnknownModelKind = '❌ Unknown model kind `{0}` (expected one of: {1})'
T_CheckpointMismatch = '❌ Checkpoint does not match the architecture. Offending parameters: {0}'
T_DatasetError = '❌ Dataset error: {0}'
T_SplitError = '❌ Cannot split dataset: {0}'
T_EmptyMask = '❌ No valid pixels to evaluate {0}'
T_MissingArtifact = '❌ Required artifact `{0}` not found. Run `{1}` first'
T_UnknownExperiment = '❌ Unknown experiment `{0}` (expected one of: {1})'
T_BlobFormatError = '❌ Malformed tensor blob `{0}`: {1}'
T_TestSceneAccess = '❌ Test scene {0} was read during training'
T_GradCheckFailed = '❌ Gradient check failed for: {0}'
T_UnknownCheck = '❌ Unknown {0} `{1}` (expected one of: {2})'
T_PlotInputError = '❌ Cannot plot `{0}`: {1}'

T_HelpGlobal = cleandoc("""
    echolab -- echolocation laboratory

    Commands:
      {0}
    """)

T_Info = cleandoc("""
    **echolab**
    Version: v.{0}
    Simulated binaural echoes, orientation-consistency pretraining and depth / normal transfer.
    """)
