/* Public C API of the VDEA cross-domain recommendation toolkit.
 *
 * All functions return a vdea_status; on failure vdea_last_error() holds a
 * human-readable message for the calling thread. Paths are UTF-8. Datasets
 * are handled through the opaque vdea_dataset pointer.
 */
#ifndef VDEA_H
#define VDEA_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum vdea_status {
    VDEA_OK = 0,
    VDEA_ERR_INTERNAL = 1,
    VDEA_ERR_USAGE = 2,   /* bad arguments or contract violation */
    VDEA_ERR_DATA = 3,    /* parse, format, or I/O failure */
    VDEA_ERR_NUMERIC = 4  /* numeric failure (divergence, domain error) */
} vdea_status;

const char* vdea_version(void);

/* Message for the most recent failure on this thread; empty on success. */
const char* vdea_last_error(void);

typedef struct vdea_dataset vdea_dataset;

/* Ingest two rating CSVs (header: user_id,item_id,rating), binarize ratings
 * >= min_rating, filter users/items with fewer than min_interactions
 * positives to a fixpoint, and write the domain pair into out_dir. */
vdea_status vdea_ingest(const char* source_csv, const char* target_csv, const char* out_dir,
                        double min_rating, int min_interactions);

/* Generate a synthetic dual-domain dataset with known cluster structure. */
vdea_status vdea_synth(const char* out_dir, int clusters, int users, int items, double k_u,
                       double noise, uint64_t seed);

/* Overlap sampling + 8:1:1 split of an ingested domain pair. */
vdea_status vdea_build(const char* domains_dir, double k_u, uint64_t seed, const char* out_dir);

vdea_status vdea_dataset_open(const char* dir, vdea_dataset** out);
void vdea_dataset_close(vdea_dataset* ds);

typedef struct vdea_dataset_info {
    uint64_t source_users, source_items, source_nnz;
    uint64_t target_users, target_items, target_nnz;
    uint64_t overlapped;
    double k_u;
    int has_labels;
} vdea_dataset_info;

vdea_status vdea_dataset_get_info(const vdea_dataset* ds, vdea_dataset_info* info);

/* config_json: flat JSON object overriding the built-in defaults (unknown
 * keys are rejected); NULL or empty means all defaults. variant: one of
 * full|base|local|global, or NULL to take it from the config. Writes
 * checkpoint.bin, trainlog.csv, and manifest.json into out_dir. */
vdea_status vdea_train(const vdea_dataset* ds, const char* config_json, const char* variant,
                       const char* out_dir);

/* split: "val" or "test". Writes metrics.csv and manifest.json. */
vdea_status vdea_evaluate(const vdea_dataset* ds, const char* checkpoint_path, const char* split,
                          const char* config_json, const char* out_dir);

/* axis: variant|lambda_vl|lambda_vg|clusters|latent_dim|k_u.
 * values_csv: comma-separated sweep values. Runs up to `jobs` cells
 * concurrently; completed cells are cached under out_dir/cells. */
vdea_status vdea_ablate(const vdea_dataset* ds, const char* config_json, const char* axis,
                        const char* values_csv, int jobs, const char* out_dir);

/* TSV export of every user's posterior-mean embedding. */
vdea_status vdea_export_embeddings(const vdea_dataset* ds, const char* checkpoint_path,
                                   const char* out_file);

#ifdef __cplusplus
}
#endif

#endif /* VDEA_H */
