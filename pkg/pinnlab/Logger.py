"""
Logging for pinnlab.  Everything goes through :py:data:`PinnLabLogger`; :py:func:`setupLogging` attaches the
info log, the debug log and the console echo of a run.
"""

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
import logging
import multiprocessing


__all__ = ['PinnLabLogger', 'setupLogging']

#: The logger every pinnlab module writes to.
PinnLabLogger = multiprocessing.get_logger()

#: Format of the info log
INFO_FORMAT     = '%(asctime)s %(processName)s %(message)s'
#: Format of the debug log and the console
DEBUG_FORMAT    = '%(asctime)s [%(levelname)s/%(processName)s] %(message)s'
DATE_FORMAT     = '%Y-%m-%d %H:%M:%S'


def _handler(handler, level, fmt):
    handler.setLevel(level)
    handler.setFormatter(logging.Formatter(fmt, DATE_FORMAT))
    PinnLabLogger.addHandler(handler)


def setupLogging(infoLogFilename, debugLogFilename, logToConsole=True, append=False):
    """
    Replaces the handlers of :py:data:`PinnLabLogger`.

    :param infoLogFilename:  receives INFO and above, or None for no info log
    :param debugLogFilename: receives everything, or None for no debug log
    :param logToConsole:     echo INFO and above to stderr
    :param append:           append to existing log files instead of truncating them
    """
    for handler in list(PinnLabLogger.handlers):
        PinnLabLogger.removeHandler(handler)
        handler.close()

    PinnLabLogger.setLevel(logging.DEBUG)
    mode = 'a' if append else 'w'

    if infoLogFilename:
        _handler(logging.FileHandler(infoLogFilename, mode=mode), logging.INFO, INFO_FORMAT)
    if debugLogFilename:
        _handler(logging.FileHandler(debugLogFilename, mode=mode), logging.DEBUG, DEBUG_FORMAT)
    if logToConsole:
        _handler(logging.StreamHandler(), logging.INFO, DEBUG_FORMAT)
