__copyright__ = "Copyright 2026 Contributing Entities"
__license__   = """
    Licensed under the Apache License, Version 2.0 (the "License");
    you may not use this file except in compliance with the License.
    You may obtain a copy of the License at

        http://www.apache.org/licenses/LICENSE-2.0

    Unless required by applicable law or agreed to in writing, software
    distributed under the License is distributed on an "AS IS" BASIS,
    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
    See the License for the specific language governing permissions and
    limitations under the License.
"""
import datetime
import os

import pandas as pd

from .Logger import PinnLabLogger
from .Util   import Util


class Performance(object):
    """
    Wall time and memory of each step of an experiment (building grids, reference solves, training, writing
    outputs).  Steps are keyed by run so that the runs of a sweep are timed separately; starting a step closes
    the open step of the same run.
    """
    #: Performance column: Run label, for experiments with several runs (e.g. an alpha_B sweep)
    PERFORMANCE_COL_RUN                       = "run"
    #: Performance column: Step name (e.g. train). String.
    PERFORMANCE_COL_STEP_NAME                 = "step_name"
    PERFORMANCE_COL_START_TIME                = "start_time"
    PERFORMANCE_COL_END_TIME                  = "end_time"
    PERFORMANCE_COL_STEP_DURATION             = "step_duration_seconds"
    #: Process resident memory in MB (SI) at the start and end of the step
    PERFORMANCE_COL_START_MEM_MB              = "start_mem_MB"
    PERFORMANCE_COL_END_MEM_MB                = "end_mem_MB"

    #: File to write performance results.  Carries timestamps so it is not part of the reproducible outputs.
    OUTPUT_PERFORMANCE_FILE                   = 'pinnlab_performance.csv'

    #: Timestamp format in the output file
    TIME_FORMAT                               = "%Y-%m-%d %H:%M:%S.%f"

    def __init__(self):
        #: finished steps, one dict per row of the output file
        self.records = []
        #: run => (step_name, start datetime, start memory in MB)
        self.open_steps = {}

    @staticmethod
    def _memory_mb():
        return Util.get_process_mem_use_bytes()/1000000.0

    def record_step_start(self, run, step_name):
        """
        Starts *step_name* for *run*, ending the step *run* was in.
        """
        if run in self.open_steps:
            self.record_step_end(run)
        self.open_steps[run] = (step_name, datetime.datetime.now(), Performance._memory_mb())

    def record_step_end(self, run):
        """
        Ends the open step of *run*, if any.
        """
        if run not in self.open_steps:
            return
        step_name, start, start_mem = self.open_steps.pop(run)
        end = datetime.datetime.now()
        self.records.append({Performance.PERFORMANCE_COL_RUN:           run,
                             Performance.PERFORMANCE_COL_STEP_NAME:     step_name,
                             Performance.PERFORMANCE_COL_START_TIME:    start.strftime(Performance.TIME_FORMAT),
                             Performance.PERFORMANCE_COL_END_TIME:      end.strftime(Performance.TIME_FORMAT),
                             Performance.PERFORMANCE_COL_STEP_DURATION: (end - start).total_seconds(),
                             Performance.PERFORMANCE_COL_START_MEM_MB:  start_mem,
                             Performance.PERFORMANCE_COL_END_MEM_MB:    Performance._memory_mb()})
        PinnLabLogger.debug("Step %s/%s took %.3f s" % (run, step_name, (end - start).total_seconds()))

    def write(self, output_dir):
        """
        Closes every open step and writes :py:attr:`Performance.OUTPUT_PERFORMANCE_FILE`.
        """
        for run in list(self.open_steps.keys()):
            self.record_step_end(run)
        if not self.records:
            return

        columns = [Performance.PERFORMANCE_COL_RUN, Performance.PERFORMANCE_COL_STEP_NAME,
                   Performance.PERFORMANCE_COL_START_TIME, Performance.PERFORMANCE_COL_END_TIME,
                   Performance.PERFORMANCE_COL_STEP_DURATION,
                   Performance.PERFORMANCE_COL_START_MEM_MB, Performance.PERFORMANCE_COL_END_MEM_MB]
        Util.write_dataframe(pd.DataFrame(self.records)[columns], "performance",
                             os.path.join(output_dir, Performance.OUTPUT_PERFORMANCE_FILE))
