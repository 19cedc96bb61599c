#    Licensed under the Apache License, Version 2.0 (the "License"); you may
#    not use this file except in compliance with the License. You may obtain
#    a copy of the License at
#
#         http://www.apache.org/licenses/LICENSE-2.0
#
#    Unless required by applicable law or agreed to in writing, software
#    distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
#    WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
#    License for the specific language governing permissions and limitations
#    under the License.

import logging
import sys
import typing as ty

ROOT_LOGGER = "shearflow"
DEFAULT_FORMAT = "%(asctime)s %(levelname)s: %(name)s %(message)s"


def setup_logging(
    name: str,
    handlers: ty.Optional[ty.List[logging.Handler]] = None,
    level: ty.Optional[int] = None,
) -> logging.Logger:
    """Set up logging for a named logger.

    Gets and initializes a named logger, ensuring it at least has a
    `logging.NullHandler` attached.

    :param str name: Name of the logger.
    :param list handlers: A list of `logging.Handler` objects to attach to
        the logger.
    :param int level: Log level to set the logger at.

    :returns: A `logging.Logger` object that can be used to emit log
        messages.
    """
    handlers = handlers or []
    log = logging.getLogger(name)
    if len(log.handlers) == 0 and not handlers:
        log.addHandler(logging.NullHandler())
    for h in handlers:
        log.addHandler(h)
    if level:
        log.setLevel(level)
    return log


def enable_logging(
    debug: bool = False,
    path: ty.Optional[str] = None,
    stream: ty.Optional[ty.TextIO] = None,
    format_stream: bool = False,
    format_template: str = DEFAULT_FORMAT,
    handlers: ty.Optional[ty.List[logging.Handler]] = None,
) -> None:
    """Enable logging output.

    Helper function to enable logging. This function is available for
    debugging purposes and for folks doing simple applications who want an
    easy 'just make it work for me'. For more complex applications or for
    those who want more flexibility, the standard library ``logging``
    package will receive these messages in any handlers you create.

    :param bool debug:
        Set this to ``True`` to receive debug messages, which include the
        per-sweep increments of the inner fixed point and every sparse
        factorization.
    :param str path:
        If a *path* is specified, logging output will written to that file
        in addition to sys.stderr.
        The path is passed to logging.FileHandler, which will append
        messages the file (and create it if needed).
    :param stream:
        One of ``None `` or ``sys.stdout`` or ``sys.stderr``.
        If it is ``None``, nothing is logged to a stream.
        If it isn't ``None``, console output is logged to this stream.
    :param bool format_stream:
        If format_stream is False, the default, apply ``format_template`` to
        ``path`` but not to ``stream`` outputs.
        If True, apply ``format_template`` to ``stream`` outputs as well.
    :param str format_template:
        Template to pass to :class:`logging.Formatter`.

    :rtype: None
    """
    if not stream and not path:
        stream = sys.stderr

    level = logging.DEBUG if debug else logging.INFO
    formatter = logging.Formatter(format_template)

    if handlers:
        for handler in handlers:
            handler.setFormatter(formatter)
    else:
        handlers = []

    if stream is not None:
        console = logging.StreamHandler(stream)
        if format_stream:
            console.setFormatter(formatter)
        handlers.append(console)

    if path is not None:
        file_handler = logging.FileHandler(path)
        file_handler.setFormatter(formatter)
        handlers.append(file_handler)

    setup_logging(ROOT_LOGGER, handlers=handlers, level=level)
