/* C API of the vibro vibration-diagnostics library.
 *
 * All objects are opaque handles created and released through these
 * functions. Every fallible call returns a vibro_status; on failure
 * vibro_last_error() describes the problem for the calling thread. Status
 * values double as the CLI exit-code contract.
 */
#ifndef VIBRO_H
#define VIBRO_H

#include <stddef.h>

#if defined(_WIN32)
#define VIBRO_API __declspec(dllexport)
#else
#define VIBRO_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum vibro_status {
    VIBRO_OK = 0,
    VIBRO_ERROR_INPUT = 1,    /* unreadable/malformed input data */
    VIBRO_ERROR_CONFIG = 2,   /* invalid configuration */
    VIBRO_ERROR_ANALYSIS = 3, /* analysis cannot proceed (e.g. no tacho pulses) */
} vibro_status;

typedef struct vibro_recording vibro_recording;
typedef struct vibro_config vibro_config;
typedef struct vibro_result vibro_result;

VIBRO_API const char* vibro_version(void);

/* Message for the last failed call on this thread; valid until the next
 * failing call. */
VIBRO_API const char* vibro_last_error(void);

/* Recordings ------------------------------------------------------------- */

VIBRO_API vibro_status vibro_recording_open(const char* path, vibro_recording** out);
VIBRO_API vibro_status vibro_recording_save(const vibro_recording* recording, const char* path);
VIBRO_API void vibro_recording_close(vibro_recording* recording);

VIBRO_API const char* vibro_recording_label(const vibro_recording* recording);
VIBRO_API double vibro_recording_sample_rate(const vibro_recording* recording);
VIBRO_API size_t vibro_recording_sample_count(const vibro_recording* recording);
VIBRO_API size_t vibro_recording_channel_count(const vibro_recording* recording);
VIBRO_API const char* vibro_recording_channel_name(const vibro_recording* recording, size_t index);
/* Borrowing pointer into the recording; count receives the sample count. */
VIBRO_API const double* vibro_recording_channel(const vibro_recording* recording, const char* name,
                                                size_t* count);

/* Configuration ---------------------------------------------------------- */

VIBRO_API vibro_status vibro_config_default(vibro_config** out);
VIBRO_API vibro_status vibro_config_open(const char* path, vibro_config** out);
VIBRO_API void vibro_config_close(vibro_config* config);

/* Synthesis and analysis -------------------------------------------------- */

/* Builds a recording from a scenario description file. */
VIBRO_API vibro_status vibro_synthesize(const char* scenario_path, vibro_recording** out);

VIBRO_API vibro_status vibro_analyze_impact(const vibro_recording* recording,
                                            const vibro_config* config, vibro_result** out);
VIBRO_API vibro_status vibro_analyze_spindle(const vibro_recording* recording,
                                             const vibro_config* config, vibro_result** out);
VIBRO_API vibro_status vibro_analyze_milling(const vibro_recording* recording,
                                             const vibro_config* config, vibro_result** out);
VIBRO_API vibro_status vibro_compare_reports(const char* const* report_paths, size_t count,
                                             const vibro_config* config, vibro_result** out);

/* Results ------------------------------------------------------------------
 * A result is a JSON report plus zero or more plot-ready CSV artifacts. With
 * reproducible != 0 the serialized report carries no timestamp, so equal
 * inputs give byte-identical output. */

VIBRO_API vibro_status vibro_result_report_json(const vibro_result* result, int reproducible,
                                                char** out_json);
VIBRO_API size_t vibro_result_artifact_count(const vibro_result* result);
VIBRO_API const char* vibro_result_artifact_name(const vibro_result* result, size_t index);
VIBRO_API const char* vibro_result_artifact_data(const vibro_result* result, size_t index);
VIBRO_API void vibro_result_close(vibro_result* result);

VIBRO_API void vibro_string_free(char* text);

#ifdef __cplusplus
}
#endif

#endif /* VIBRO_H */
