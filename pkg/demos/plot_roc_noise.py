"""
ROC curves under missed observations
====================================

A monitor may miss links. With signal-to-noise ratio ``snr`` each observed
edge survives with probability ``1 - 1/snr``. We score each trial by its
maximum scaled statistic and sweep the threshold.
"""
from eclipse_detect.evaluation import run_roc
from eclipse_detect.presets import preset_config, preset_scenario

scenario = preset_scenario("paper-iv", attack=True, tau=600)
curves = run_roc(scenario, [float("inf"), 4.0, 2.0], trials_per_class=20,
                 config=preset_config("paper-iv"), seed=0)

###############################################################################
# Area under each curve.
for c in curves:
    print("snr", c.config["snr"] or "inf", "AUC", round(c.auc, 3))

###############################################################################
# The first few ROC points for the noisiest setting.
for fpr, tpr, thr in curves[-1].points[:5]:
    print(f"threshold {thr:8.2f}  FPR {fpr:.2f}  TPR {tpr:.2f}")
